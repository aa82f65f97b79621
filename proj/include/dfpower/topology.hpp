#pragma once

// Star topology and its five perturbations. Node numbering follows the
// usual convention for these networks: the centre is node 1 (storage index
// 0) and the new attacker / dissent nodes take the highest indices.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfpower/errors.hpp"
#include "dfpower/graph_core.hpp"

namespace dfpower {

enum class VariationKind {
  Star,
  SingleAttack,
  CoordinatedDouble,
  UncoordinatedDouble,
  DissentingSubjects,
  LeadershipGroup,
};

inline std::string_view to_string(VariationKind k) {
  switch (k) {
    case VariationKind::Star: return "Star";
    case VariationKind::SingleAttack: return "SingleAttack";
    case VariationKind::CoordinatedDouble: return "CoordinatedDouble";
    case VariationKind::UncoordinatedDouble: return "UncoordinatedDouble";
    case VariationKind::DissentingSubjects: return "DissentingSubjects";
    case VariationKind::LeadershipGroup: return "LeadershipGroup";
  }
  return "?";
}

inline VariationKind parse_variation_kind(std::string_view s) {
  for (auto k : {VariationKind::Star, VariationKind::SingleAttack,
                 VariationKind::CoordinatedDouble, VariationKind::UncoordinatedDouble,
                 VariationKind::DissentingSubjects, VariationKind::LeadershipGroup}) {
    if (s == to_string(k)) return k;
  }
  throw ConstraintError("unknown variation kind '" + std::string(s) + "'");
}

inline std::size_t minimum_nodes(VariationKind k) {
  switch (k) {
    case VariationKind::Star: return 3;
    case VariationKind::SingleAttack: return 4;
    case VariationKind::CoordinatedDouble: return 5;
    case VariationKind::UncoordinatedDouble: return 5;
    case VariationKind::DissentingSubjects: return 4;
    case VariationKind::LeadershipGroup: return 3;
  }
  return 3;
}

// One topology and its parameters.
//
// `center_row` is the full outgoing row of the centre over the n nodes of
// the (first) star, self entry included and equal to 0. Entries for nodes the
// centre has no edge to (attackers) must be 0. For LeadershipGroup,
// `center_row` spans nodes 1..n and `center_row_2` spans nodes n+1..n+m of
// the second star; beta1 = c_{1,n+1} and beta2 = c_{n+1,1} are inserted by
// the constructor. By default both rows must already total 1 - beta; with
// `rescale_center_rows` they are taken as pre-merge rows summing to 1 and
// scaled by (1 - beta).
struct VariationSpec {
  VariationKind kind = VariationKind::Star;
  std::size_t n = 0;
  std::optional<std::size_t> m;
  std::vector<double> center_row;
  std::vector<double> center_row_2;
  std::optional<double> beta1;
  std::optional<double> beta2;
  bool rescale_center_rows = false;

  std::size_t node_count() const {
    return kind == VariationKind::LeadershipGroup ? n + m.value_or(0) : n;
  }

  static VariationSpec star(std::vector<double> row) {
    VariationSpec s;
    s.kind = VariationKind::Star;
    s.n = row.size();
    s.center_row = std::move(row);
    return s;
  }
  static VariationSpec single_attack(std::vector<double> row, double beta) {
    VariationSpec s;
    s.kind = VariationKind::SingleAttack;
    s.n = row.size();
    s.center_row = std::move(row);
    s.beta1 = beta;
    return s;
  }
  static VariationSpec two_betas(VariationKind kind, std::vector<double> row,
                                 double b1, double b2) {
    VariationSpec s;
    s.kind = kind;
    s.n = row.size();
    s.center_row = std::move(row);
    s.beta1 = b1;
    s.beta2 = b2;
    return s;
  }
  static VariationSpec leadership_group(std::vector<double> row1,
                                        std::vector<double> row2, double b1,
                                        double b2, bool rescale = false) {
    VariationSpec s;
    s.kind = VariationKind::LeadershipGroup;
    s.n = row1.size();
    s.m = row2.size();
    s.center_row = std::move(row1);
    s.center_row_2 = std::move(row2);
    s.beta1 = b1;
    s.beta2 = b2;
    s.rescale_center_rows = rescale;
    return s;
  }
};

namespace detail {

inline double require_beta(const std::optional<double>& b, const char* name) {
  if (!b) throw ConstraintError(std::string(name) + " is required");
  if (!std::isfinite(*b)) throw NumericInputError(std::string(name) + " must be finite");
  if (!(*b > 0.0 && *b < 1.0)) {
    throw ConstraintError(std::string(name) + " = " + std::to_string(*b) +
                          " must lie strictly inside (0, 1)");
  }
  return *b;
}

// Checks self entry 0, entries [1, positive_end) positive, the rest zero,
// and the row total.
inline void check_row(std::span<const double> row, std::size_t positive_end,
                      double expected_sum, const char* what) {
  for (double v : row) {
    if (!std::isfinite(v)) throw NumericInputError(std::string(what) + " has non-finite entries");
  }
  if (row[0] != 0.0) throw ConstraintError(std::string(what) + ": self weight must be 0");
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (j < positive_end && !(row[j] > 0.0)) {
      throw ConstraintError(std::string(what) + ": entry " + std::to_string(j + 1) +
                            " must be positive");
    }
    if (j >= positive_end && row[j] != 0.0) {
      throw ConstraintError(std::string(what) + ": entry " + std::to_string(j + 1) +
                            " must be 0 (no edge from the centre)");
    }
  }
  double sum = 0.0;
  for (double v : row) sum += v;
  if (std::abs(sum - expected_sum) > kRowSumTolerance) {
    throw ConstraintError(std::string(what) + " sums to " + std::to_string(sum) +
                          ", expected " + std::to_string(expected_sum));
  }
}

inline void require_kind(const VariationSpec& s, VariationKind k) {
  if (s.kind != k) {
    throw PreconditionError("expected a " + std::string(to_string(k)) +
                            " spec, got " + std::string(to_string(s.kind)));
  }
}

}  // namespace detail

// Throws on any violated invariant; otherwise returns normally.
inline void validate_spec(const VariationSpec& s) {
  const std::size_t min_n = minimum_nodes(s.kind);
  if (s.n < min_n) {
    throw DimensionError(std::string(to_string(s.kind)) + " needs n >= " +
                         std::to_string(min_n) + ", got " + std::to_string(s.n));
  }
  if (s.center_row.size() != s.n) {
    throw DimensionError("center_row must have n = " + std::to_string(s.n) +
                         " entries, got " + std::to_string(s.center_row.size()));
  }
  switch (s.kind) {
    case VariationKind::Star:
      detail::check_row(s.center_row, s.n, 1.0, "center_row");
      break;
    case VariationKind::SingleAttack:
      detail::require_beta(s.beta1, "beta1");
      detail::check_row(s.center_row, s.n - 1, 1.0, "center_row");
      break;
    case VariationKind::CoordinatedDouble: {
      const double b1 = detail::require_beta(s.beta1, "beta1");
      const double b2 = detail::require_beta(s.beta2, "beta2");
      if (!(b1 + b2 < 1.0)) {
        throw ConstraintError("CoordinatedDouble requires beta1 + beta2 < 1, got " +
                              std::to_string(b1 + b2));
      }
      detail::check_row(s.center_row, s.n - 2, 1.0, "center_row");
      break;
    }
    case VariationKind::UncoordinatedDouble:
      detail::require_beta(s.beta1, "beta1");
      detail::require_beta(s.beta2, "beta2");
      detail::check_row(s.center_row, s.n - 2, 1.0, "center_row");
      break;
    case VariationKind::DissentingSubjects:
      detail::require_beta(s.beta1, "beta1");
      detail::require_beta(s.beta2, "beta2");
      detail::check_row(s.center_row, s.n, 1.0, "center_row");
      break;
    case VariationKind::LeadershipGroup: {
      const double b1 = detail::require_beta(s.beta1, "beta1");
      const double b2 = detail::require_beta(s.beta2, "beta2");
      if (!s.m || *s.m < 3) throw DimensionError("LeadershipGroup needs m >= 3");
      if (s.center_row_2.size() != *s.m) {
        throw DimensionError("center_row_2 must have m entries");
      }
      const bool r = s.rescale_center_rows;
      detail::check_row(s.center_row, s.n, r ? 1.0 : 1.0 - b1, "center_row");
      detail::check_row(s.center_row_2, *s.m, r ? 1.0 : 1.0 - b2, "center_row_2");
      break;
    }
  }
}

// Star with centre node 1 and the given weights on the n - 1 leaves.
inline InteractionMatrix star(std::span<const double> leaf_weights) {
  const std::size_t n = leaf_weights.size() + 1;
  if (n < 3) throw DimensionError("a star needs at least 2 leaves");
  std::vector<double> row(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) row[j] = leaf_weights[j - 1];
  detail::check_row(row, n, 1.0, "star weights");
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j < n; ++j) {
    c(0, static_cast<Eigen::Index>(j)) = row[j];
    c(static_cast<Eigen::Index>(j), 0) = 1.0;
  }
  return InteractionMatrix(std::move(c));
}

namespace detail {

// Rows 2..n point at the centre; row 1 is the centre row.
inline Matrix star_skeleton(const std::vector<double>& row) {
  const auto n = static_cast<Eigen::Index>(row.size());
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) c(0, j) = row[static_cast<std::size_t>(j)];
  for (Eigen::Index i = 1; i < n; ++i) c(i, 0) = 1.0;
  return c;
}

}  // namespace detail

// Attacker n attaches to subject n-1: c_{n-1,n} = beta, c_{n,n-1} = 1.
inline InteractionMatrix single_attack(const VariationSpec& s) {
  detail::require_kind(s, VariationKind::SingleAttack);
  validate_spec(s);
  const double beta = *s.beta1;
  const auto n = static_cast<Eigen::Index>(s.n);
  Matrix c = detail::star_skeleton(s.center_row);
  c(n - 2, 0) = 1.0 - beta;
  c(n - 2, n - 1) = beta;
  c(n - 1, 0) = 0.0;
  c(n - 1, n - 2) = 1.0;
  return InteractionMatrix(std::move(c));
}

// Attackers n-1 and n both attach to subject n-2.
inline InteractionMatrix coordinated_double(const VariationSpec& s) {
  detail::require_kind(s, VariationKind::CoordinatedDouble);
  validate_spec(s);
  const double b1 = *s.beta1;
  const double b2 = *s.beta2;
  const auto n = static_cast<Eigen::Index>(s.n);
  Matrix c = detail::star_skeleton(s.center_row);
  c(n - 3, 0) = 1.0 - (b1 + b2);
  c(n - 3, n - 2) = b1;
  c(n - 3, n - 1) = b2;
  for (Eigen::Index a : {n - 2, n - 1}) {
    c(a, 0) = 0.0;
    c(a, n - 3) = 1.0;
  }
  return InteractionMatrix(std::move(c));
}

// Attacker n-1 attaches to subject n-3, attacker n to subject n-2.
inline InteractionMatrix uncoordinated_double(const VariationSpec& s) {
  detail::require_kind(s, VariationKind::UncoordinatedDouble);
  validate_spec(s);
  const double b1 = *s.beta1;
  const double b2 = *s.beta2;
  const auto n = static_cast<Eigen::Index>(s.n);
  Matrix c = detail::star_skeleton(s.center_row);
  c(n - 4, 0) = 1.0 - b1;
  c(n - 4, n - 2) = b1;
  c(n - 3, 0) = 1.0 - b2;
  c(n - 3, n - 1) = b2;
  c(n - 2, 0) = 0.0;
  c(n - 2, n - 4) = 1.0;
  c(n - 1, 0) = 0.0;
  c(n - 1, n - 3) = 1.0;
  return InteractionMatrix(std::move(c));
}

// Subjects n-1 and n trust each other: c_{n-1,n} = beta1, c_{n,n-1} = beta2.
inline InteractionMatrix dissenting_subjects(const VariationSpec& s) {
  detail::require_kind(s, VariationKind::DissentingSubjects);
  validate_spec(s);
  const double b1 = *s.beta1;
  const double b2 = *s.beta2;
  const auto n = static_cast<Eigen::Index>(s.n);
  Matrix c = detail::star_skeleton(s.center_row);
  c(n - 2, 0) = 1.0 - b1;
  c(n - 2, n - 1) = b1;
  c(n - 1, 0) = 1.0 - b2;
  c(n - 1, n - 2) = b2;
  return InteractionMatrix(std::move(c));
}

// Two stars with centres 1 and n+1, joined by c_{1,n+1} = beta1 and
// c_{n+1,1} = beta2.
inline InteractionMatrix leadership_group(const VariationSpec& s) {
  detail::require_kind(s, VariationKind::LeadershipGroup);
  validate_spec(s);
  const double b1 = *s.beta1;
  const double b2 = *s.beta2;
  const auto n = static_cast<Eigen::Index>(s.n);
  const auto m = static_cast<Eigen::Index>(*s.m);
  const double scale1 = s.rescale_center_rows ? 1.0 - b1 : 1.0;
  const double scale2 = s.rescale_center_rows ? 1.0 - b2 : 1.0;
  Matrix c = Matrix::Zero(n + m, n + m);
  for (Eigen::Index j = 1; j < n; ++j) {
    c(0, j) = scale1 * s.center_row[static_cast<std::size_t>(j)];
    c(j, 0) = 1.0;
  }
  c(0, n) = b1;
  c(n, 0) = b2;
  for (Eigen::Index k = 1; k < m; ++k) {
    c(n, n + k) = scale2 * s.center_row_2[static_cast<std::size_t>(k)];
    c(n + k, n) = 1.0;
  }
  return InteractionMatrix(std::move(c));
}

inline InteractionMatrix build(const VariationSpec& s) {
  switch (s.kind) {
    case VariationKind::Star:
      validate_spec(s);
      return star(std::span<const double>(s.center_row).subspan(1));
    case VariationKind::SingleAttack: return single_attack(s);
    case VariationKind::CoordinatedDouble: return coordinated_double(s);
    case VariationKind::UncoordinatedDouble: return uncoordinated_double(s);
    case VariationKind::DissentingSubjects: return dissenting_subjects(s);
    case VariationKind::LeadershipGroup: return leadership_group(s);
  }
  throw PreconditionError("unknown variation kind");
}

}  // namespace dfpower
