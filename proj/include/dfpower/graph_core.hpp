#pragma once

// Relative interaction matrices: validation, strong connectivity, star
// detection and the Perron left eigenvector.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dfpower/errors.hpp"

namespace dfpower {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kRowSumTolerance = 1e-12;
inline constexpr double kDefaultEigenTolerance = 1e-12;
inline constexpr std::size_t kDefaultEigenIterationCap = 1'000'000;

struct ValidationReport {
  bool row_stochastic = false;
  bool zero_diagonal = false;
  bool nonnegative = false;
  bool irreducible = false;
  // 0-based index of the star centre; set only for irreducible stars.
  std::optional<std::size_t> star_center;
  double worst_row_sum_error = 0.0;

  bool ok() const noexcept {
    return row_stochastic && zero_diagonal && nonnegative && irreducible;
  }
};

namespace detail {

inline void require_square(const Matrix& c) {
  if (c.rows() != c.cols()) {
    throw DimensionError("interaction matrix must be square, got " +
                         std::to_string(c.rows()) + "x" +
                         std::to_string(c.cols()));
  }
}

inline void require_finite(const Matrix& c) {
  if (!c.allFinite()) {
    throw NumericInputError("matrix contains NaN or infinite entries");
  }
}

// Nodes reachable from `start` following i -> j whenever the (i, j) entry is
// positive; `transpose` walks the reversed edges.
inline std::vector<bool> reachable(const Matrix& c, Eigen::Index start,
                                   bool transpose) {
  const Eigen::Index n = c.rows();
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> stack{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!stack.empty()) {
    const Eigen::Index u = stack.back();
    stack.pop_back();
    for (Eigen::Index v = 0; v < n; ++v) {
      const double w = transpose ? c(v, u) : c(u, v);
      if (w > 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

// Node touched by every off-diagonal positive entry, if any. Assumes n >= 3,
// where such a node is unique whenever there are at least two disjoint edges
// or the graph is strongly connected.
inline std::optional<std::size_t> star_hub(const Matrix& c) {
  const Eigen::Index n = c.rows();
  for (Eigen::Index hub = 0; hub < n; ++hub) {
    bool all_touch = true;
    for (Eigen::Index i = 0; i < n && all_touch; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j && c(i, j) > 0.0 && i != hub && j != hub) {
          all_touch = false;
          break;
        }
      }
    }
    if (all_touch) return static_cast<std::size_t>(hub);
  }
  return std::nullopt;
}

}  // namespace detail

// True iff every node reaches every other node in the digraph with an edge
// for each positive entry. Decided on the exact sparsity pattern.
inline bool is_strongly_connected(const Matrix& c) {
  detail::require_square(c);
  if (c.rows() == 0) return false;
  const auto fwd = detail::reachable(c, 0, false);
  const auto bwd = detail::reachable(c, 0, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

// Checks each property independently; never throws for a well-formed numeric
// square input of size >= 3.
inline ValidationReport validate(const Matrix& c) {
  detail::require_square(c);
  if (c.rows() < 3) {
    throw DimensionError("interaction matrix needs n >= 3, got n = " +
                         std::to_string(c.rows()));
  }
  detail::require_finite(c);

  ValidationReport report;
  report.nonnegative = (c.array() >= 0.0).all();
  report.zero_diagonal = (c.diagonal().array() == 0.0).all();
  const Vector row_err = (c.rowwise().sum().array() - 1.0).abs();
  report.worst_row_sum_error = row_err.maxCoeff();
  report.row_stochastic = report.worst_row_sum_error <= kRowSumTolerance;
  report.irreducible = is_strongly_connected(c);
  if (report.irreducible) report.star_center = detail::star_hub(c);
  return report;
}

inline std::string describe_failures(const ValidationReport& r) {
  std::string out;
  auto add = [&out](const char* s) {
    if (!out.empty()) out += ", ";
    out += s;
  };
  if (!r.row_stochastic) add("not row-stochastic");
  if (!r.zero_diagonal) add("nonzero diagonal");
  if (!r.nonnegative) add("negative entries");
  if (!r.irreducible) add("not strongly connected");
  return out;
}

// A validated relative interaction matrix: row-stochastic, zero diagonal,
// nonnegative, strongly connected. Immutable once built.
class InteractionMatrix {
 public:
  explicit InteractionMatrix(Matrix c) : c_(std::move(c)) {
    report_ = validate(c_);
    if (!report_.ok()) {
      throw ValidationError("invalid interaction matrix: " +
                            describe_failures(report_));
    }
  }

  const Matrix& matrix() const noexcept { return c_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(c_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return c_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const ValidationReport& report() const noexcept { return report_; }

 private:
  Matrix c_;
  ValidationReport report_;
};

// Centre of a star topology: every edge is to or from it.
inline std::optional<std::size_t> detect_star(const InteractionMatrix& c) {
  return c.report().star_center;
}

struct DominantLeftEigenvector {
  Vector gamma;          // positive, sums to 1
  double residual = 0;   // max_i |(gamma^T C - gamma^T)_i|
  std::size_t iterations = 0;
};

// Normalized left eigenvector for eigenvalue 1 of an irreducible
// row-stochastic matrix, by power iteration on the lazy chain
// g <- (g + g P) / 2. The lazy step removes periodicity without moving the
// fixed point.
//
// Converged once ||g P - g||_inf <= tol. The forward error is roughly the
// residual divided by the spectral gap, so after reaching tol the iteration
// keeps going while the residual still shrinks, down to tol * 1e-3.
inline DominantLeftEigenvector stationary_left_vector(
    const Matrix& p, double tol = kDefaultEigenTolerance,
    std::size_t max_iterations = kDefaultEigenIterationCap) {
  detail::require_square(p);
  if (!(tol > 0.0)) throw PreconditionError("eigenvector tolerance must be > 0");
  const Eigen::Index n = p.rows();
  Eigen::RowVectorXd g = Eigen::RowVectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::RowVectorXd next(n);
  std::optional<DominantLeftEigenvector> best;
  double residual = 0.0;
  for (std::size_t it = 0; it <= max_iterations; ++it) {
    next.noalias() = g * p;
    residual = (next - g).cwiseAbs().maxCoeff();
    if (best && residual >= best->residual) return *best;
    if (residual <= tol) {
      best = DominantLeftEigenvector{g.transpose(), residual, it};
      if (residual <= tol * 1e-3) return *best;
    }
    g = 0.5 * (g + next);
    g /= g.sum();
  }
  if (best) return *best;
  throw ConvergenceError("left eigenvector power iteration did not converge",
                         residual);
}

inline DominantLeftEigenvector dominant_left_eigenvector(
    const InteractionMatrix& c, double tol = kDefaultEigenTolerance,
    std::size_t max_iterations = kDefaultEigenIterationCap) {
  return stationary_left_vector(c.matrix(), tol, max_iterations);
}

}  // namespace dfpower
