#pragma once

// DeGroot-Friedkin dynamics: opinion consensus within an issue and the
// reflected self-appraisal update of self-weights between issues.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfpower/errors.hpp"
#include "dfpower/graph_core.hpp"

namespace dfpower {

inline constexpr double kSimplexTolerance = 1e-12;
inline constexpr double kDefaultEquilibriumTolerance = 1e-12;
inline constexpr std::size_t kDefaultMaxIssues = 1'000'000;

// A point on the probability simplex: individual self-weights / social power.
class SelfWeights {
 public:
  explicit SelfWeights(Vector x) : x_(std::move(x)) {
    if (x_.size() == 0) throw DimensionError("self-weight vector is empty");
    if (!x_.allFinite()) throw NumericInputError("self-weights must be finite");
    if ((x_.array() < 0.0).any() || (x_.array() > 1.0).any()) {
      throw ValidationError("self-weights must lie in [0, 1]");
    }
    if (std::abs(x_.sum() - 1.0) > kSimplexTolerance) {
      throw ValidationError("self-weights must sum to 1");
    }
  }

  static SelfWeights uniform(std::size_t n) {
    return SelfWeights(Vector::Constant(static_cast<Eigen::Index>(n),
                                        1.0 / static_cast<double>(n)));
  }

  static SelfWeights vertex(std::size_t n, std::size_t i) {
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e(static_cast<Eigen::Index>(i)) = 1.0;
    return SelfWeights(std::move(e));
  }

  const Vector& values() const noexcept { return x_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.size()); }
  double operator[](std::size_t i) const { return x_(static_cast<Eigen::Index>(i)); }

 private:
  Vector x_;
};

// Index i with x_i == 1 exactly. The comparison is exact on purpose: points
// arbitrarily close to a vertex take the smooth branch of the map.
inline std::optional<std::size_t> is_vertex(const SelfWeights& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 1.0) return i;
  }
  return std::nullopt;
}

// W = X + (I - X) C with X = diag(x).
class InfluenceMatrix {
 public:
  const Matrix& matrix() const noexcept { return w_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(w_.rows()); }

 private:
  explicit InfluenceMatrix(Matrix w) : w_(std::move(w)) {}
  friend InfluenceMatrix build_influence_matrix(const InteractionMatrix&,
                                                const SelfWeights&);
  Matrix w_;
};

inline InfluenceMatrix build_influence_matrix(const InteractionMatrix& c,
                                              const SelfWeights& x) {
  if (c.size() != x.size()) {
    throw DimensionError("matrix has n = " + std::to_string(c.size()) +
                         " but self-weights have length " +
                         std::to_string(x.size()));
  }
  const Vector& xv = x.values();
  Matrix w = (1.0 - xv.array()).matrix().asDiagonal() * c.matrix();
  w.diagonal() = xv;
  return InfluenceMatrix(std::move(w));
}

struct ConsensusResult {
  double value = 0.0;
  std::size_t steps = 0;
  std::vector<Vector> trajectory;  // y(0), y(1), ... when requested
};

// Iterates y(t+1) = W y(t) until max_i y_i - min_i y_i <= tol and returns
// the midpoint of the final spread.
inline ConsensusResult degroot_consensus(const InfluenceMatrix& w,
                                         const Vector& y0, double tol,
                                         std::size_t t_max,
                                         bool record_trajectory = false) {
  if (static_cast<std::size_t>(y0.size()) != w.size()) {
    throw DimensionError("opinion vector length does not match W");
  }
  if (!(tol > 0.0)) throw PreconditionError("consensus tolerance must be > 0");
  if (!y0.allFinite()) throw NumericInputError("opinions must be finite");
  ConsensusResult out;
  Vector y = y0;
  Vector next(y.size());
  if (record_trajectory) out.trajectory.push_back(y);
  for (std::size_t t = 0;; ++t) {
    const double hi = y.maxCoeff();
    const double lo = y.minCoeff();
    if (hi - lo <= tol) {
      out.value = 0.5 * (hi + lo);
      out.steps = t;
      return out;
    }
    if (t == t_max) {
      throw ConvergenceError("DeGroot opinions did not reach consensus", hi - lo);
    }
    next.noalias() = w.matrix() * y;
    y.swap(next);
    if (record_trajectory) out.trajectory.push_back(y);
  }
}

// The map F:  F(e_i) = e_i,  otherwise F(x)_i = a(x) gamma_i / (1 - x_i) with
// a(x) normalizing the result onto the simplex.
inline Vector df_map(const Vector& gamma, const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) == 1.0) {
      Vector e = Vector::Zero(x.size());
      e(i) = 1.0;
      return e;
    }
  }
  Vector y = gamma.array() / (1.0 - x.array());
  return y / y.sum();
}

inline SelfWeights df_map(const DominantLeftEigenvector& gamma,
                          const SelfWeights& x) {
  if (static_cast<std::size_t>(gamma.gamma.size()) != x.size()) {
    throw DimensionError("gamma and self-weights differ in length");
  }
  return SelfWeights(df_map(gamma.gamma, x.values()));
}

// One issue of reflected self-appraisal: x(s+1) is the normalized dominant
// left eigenvector of W(s). Used to cross-check the F route.
inline SelfWeights self_appraisal_update(
    const InteractionMatrix& c, const SelfWeights& x,
    double tol = kDefaultEigenTolerance,
    std::size_t max_iterations = kDefaultEigenIterationCap) {
  if (c.size() != x.size()) {
    throw DimensionError("matrix and self-weights differ in dimension");
  }
  if (auto v = is_vertex(x)) return SelfWeights::vertex(x.size(), *v);
  const InfluenceMatrix w = build_influence_matrix(c, x);
  Vector zeta = stationary_left_vector(w.matrix(), tol, max_iterations).gamma;
  zeta = zeta.cwiseMax(0.0);
  return SelfWeights(zeta / zeta.sum());
}

struct EquilibriumOptions {
  double tol = kDefaultEquilibriumTolerance;
  std::size_t max_issues = kDefaultMaxIssues;
  bool record_states = false;
  // Called after every issue with (s, x(s)); returning true stops early.
  std::function<bool(std::size_t, const Vector&)> stop;
};

struct IssueTrajectory {
  // Every x(s) when record_states is set, otherwise {x(0), x(final)}.
  std::vector<SelfWeights> states;
  bool converged = false;
  bool stopped_early = false;
  double final_residual = 0.0;
  std::size_t issues = 0;

  const SelfWeights& final_state() const { return states.back(); }
};

// Iterates x(s+1) = F(x(s)) from an interior (non-vertex) start. Converged
// means ||x(s+1) - x(s)||_inf <= tol and the reported state also satisfies
// ||F(x) - x||_inf <= tol.
inline IssueTrajectory iterate_to_equilibrium(const InteractionMatrix& c,
                                              const SelfWeights& x0,
                                              const EquilibriumOptions& opt = {}) {
  if (c.size() != x0.size()) {
    throw DimensionError("matrix and initial self-weights differ in dimension");
  }
  if (is_vertex(x0)) {
    throw PreconditionError("initial self-weights must not be a simplex vertex");
  }
  if (!(opt.tol > 0.0)) throw PreconditionError("equilibrium tolerance must be > 0");

  const Vector gamma = dominant_left_eigenvector(c).gamma;
  IssueTrajectory out;
  out.states.push_back(x0);
  Vector x = x0.values();
  Vector next = df_map(gamma, x);
  double residual = (next - x).cwiseAbs().maxCoeff();
  std::size_t s = 0;
  while (s < opt.max_issues) {
    x.swap(next);
    ++s;
    if (opt.record_states) out.states.emplace_back(x);
    const double previous_step = residual;
    next = df_map(gamma, x);
    residual = (next - x).cwiseAbs().maxCoeff();
    if (previous_step <= opt.tol && residual <= opt.tol) {
      out.converged = true;
      break;
    }
    if (opt.stop && opt.stop(s, x)) {
      out.stopped_early = true;
      break;
    }
  }
  if (!opt.record_states) out.states.emplace_back(x);
  out.final_residual = residual;
  out.issues = s;
  return out;
}

}  // namespace dfpower
