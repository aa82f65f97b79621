#pragma once

// Closed-form dominant left eigenvectors of the star perturbations and the
// threshold conditions deciding who holds the most social power.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dfpower/errors.hpp"
#include "dfpower/graph_core.hpp"
#include "dfpower/topology.hpp"

namespace dfpower {

inline constexpr double kTieTolerance = 1e-9;

enum class Relation { Less, Greater };

inline const char* to_string(Relation r) { return r == Relation::Less ? "<" : ">"; }

// How a verdict relates to its ordering claim.
//   Equivalence: holds <=> claim is true.
//   Necessary:   claim is true  => holds (a necessary condition).
//   Audit:       reported for comparison only.
enum class VerdictRole { Equivalence, Necessary, Audit };

inline const char* to_string(VerdictRole r) {
  switch (r) {
    case VerdictRole::Equivalence: return "iff";
    case VerdictRole::Necessary: return "necessary";
    case VerdictRole::Audit: return "audit";
  }
  return "?";
}

// gamma[node] > gamma[j] for every j in `below` (0-based indices).
struct OrderingClaim {
  std::size_t node = 0;
  std::vector<std::size_t> below;
};

struct Verdict {
  bool holds = false;  // `lhs relation critical`, strictly
  bool tie = false;    // |lhs - critical| <= kTieTolerance
  double lhs = 0.0;
  double critical = 0.0;
  Relation relation = Relation::Less;
  VerdictRole role = VerdictRole::Equivalence;
  std::optional<OrderingClaim> claim;
};

struct ThresholdReport {
  VariationSpec variation;
  std::map<std::string, Verdict> verdicts;
  Vector gamma;                               // closed form
  std::vector<std::size_t> predicted_leader;  // 0-based, several on a tie
};

struct PowerOrdering {
  std::vector<std::size_t> ranking;  // descending power, stable on ties
  std::vector<std::size_t> leader;   // everyone within kTieTolerance of the top
  Vector values;
};

inline PowerOrdering power_ordering(const Vector& values) {
  if (values.size() == 0) throw DimensionError("empty power vector");
  if (!values.allFinite() || (values.array() < 0.0).any() ||
      std::abs(values.sum() - 1.0) > kTieTolerance) {
    throw PreconditionError("power vector must be nonnegative and sum to 1");
  }
  PowerOrdering out;
  out.values = values;
  out.ranking.resize(static_cast<std::size_t>(values.size()));
  std::iota(out.ranking.begin(), out.ranking.end(), std::size_t{0});
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [&](std::size_t a, std::size_t b) {
                     return values(static_cast<Eigen::Index>(a)) >
                            values(static_cast<Eigen::Index>(b));
                   });
  const double top = values(static_cast<Eigen::Index>(out.ranking.front()));
  for (std::size_t i : out.ranking) {
    if (top - values(static_cast<Eigen::Index>(i)) <= kTieTolerance) {
      out.leader.push_back(i);
    }
  }
  std::sort(out.leader.begin(), out.leader.end());
  return out;
}

// Whether the claim holds for `gamma`, or nullopt when some gap it depends on
// is within `margin` and no gap already refutes it.
inline std::optional<bool> evaluate_claim(const OrderingClaim& claim,
                                          const Vector& gamma, double margin) {
  const double top = gamma(static_cast<Eigen::Index>(claim.node));
  bool ambiguous = false;
  for (std::size_t j : claim.below) {
    const double gap = top - gamma(static_cast<Eigen::Index>(j));
    if (gap < -margin) return false;
    if (gap <= margin) ambiguous = true;
  }
  if (ambiguous) return std::nullopt;
  return true;
}

// Outgoing weights of the two centres as they appear in the built matrix.
inline std::pair<std::vector<double>, std::vector<double>> effective_center_rows(
    const VariationSpec& s) {
  std::vector<double> r1 = s.center_row;
  std::vector<double> r2 = s.center_row_2;
  if (s.kind == VariationKind::LeadershipGroup && s.rescale_center_rows) {
    for (double& v : r1) v *= 1.0 - *s.beta1;
    for (double& v : r2) v *= 1.0 - *s.beta2;
  }
  return {std::move(r1), std::move(r2)};
}

// Solves gamma^T C = gamma^T for the constructed topology from its linear
// relations (centre weight fixed to 1, then normalized). No iteration.
inline DominantLeftEigenvector gamma_closed_form(const VariationSpec& s) {
  validate_spec(s);
  const std::size_t n = s.n;
  const auto& row = s.center_row;
  Vector g = Vector::Zero(static_cast<Eigen::Index>(s.node_count()));
  auto at = [&g](std::size_t i) -> double& { return g(static_cast<Eigen::Index>(i)); };
  at(0) = 1.0;
  switch (s.kind) {
    case VariationKind::Star:
      for (std::size_t i = 1; i < n; ++i) at(i) = row[i];
      break;
    case VariationKind::SingleAttack: {
      const double beta = *s.beta1;
      for (std::size_t i = 1; i + 2 < n; ++i) at(i) = row[i];
      at(n - 2) = row[n - 2] / (1.0 - beta);
      at(n - 1) = beta * at(n - 2);
      break;
    }
    case VariationKind::CoordinatedDouble: {
      const double b1 = *s.beta1, b2 = *s.beta2;
      for (std::size_t i = 1; i + 3 < n; ++i) at(i) = row[i];
      at(n - 3) = row[n - 3] / (1.0 - b1 - b2);
      at(n - 2) = b1 * at(n - 3);
      at(n - 1) = b2 * at(n - 3);
      break;
    }
    case VariationKind::UncoordinatedDouble: {
      const double b1 = *s.beta1, b2 = *s.beta2;
      for (std::size_t i = 1; i + 4 < n; ++i) at(i) = row[i];
      at(n - 4) = row[n - 4] / (1.0 - b1);
      at(n - 3) = row[n - 3] / (1.0 - b2);
      at(n - 2) = b1 * at(n - 4);
      at(n - 1) = b2 * at(n - 3);
      break;
    }
    case VariationKind::DissentingSubjects: {
      const double b1 = *s.beta1, b2 = *s.beta2;
      const double a = row[n - 2], b = row[n - 1];
      for (std::size_t i = 1; i + 2 < n; ++i) at(i) = row[i];
      at(n - 2) = (a + b2 * b) / (1.0 - b1 * b2);
      at(n - 1) = (b + b1 * a) / (1.0 - b1 * b2);
      break;
    }
    case VariationKind::LeadershipGroup: {
      const double b1 = *s.beta1, b2 = *s.beta2;
      const auto [r1, r2] = effective_center_rows(s);
      const std::size_t m = *s.m;
      for (std::size_t i = 1; i < n; ++i) at(i) = r1[i];
      at(n) = b1 / b2;
      for (std::size_t k = 1; k < m; ++k) at(n + k) = r2[k] * at(n);
      break;
    }
  }
  g /= g.sum();
  DominantLeftEigenvector out;
  const Matrix c = build(s).matrix();
  out.residual = (g.transpose() * c - g.transpose()).cwiseAbs().maxCoeff();
  out.gamma = std::move(g);
  return out;
}

namespace detail {

inline Verdict make_verdict(double lhs, Relation rel, double critical,
                            VerdictRole role, std::optional<OrderingClaim> claim) {
  Verdict v;
  v.lhs = lhs;
  v.critical = critical;
  v.relation = rel;
  v.holds = rel == Relation::Less ? lhs < critical : lhs > critical;
  v.tie = std::abs(lhs - critical) <= kTieTolerance;
  v.role = role;
  v.claim = std::move(claim);
  return v;
}

inline Verdict iff(double lhs, Relation rel, double critical, OrderingClaim claim) {
  return make_verdict(lhs, rel, critical, VerdictRole::Equivalence, std::move(claim));
}

inline std::vector<std::size_t> range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> v;
  for (std::size_t i = first; i < last; ++i) v.push_back(i);
  return v;
}

inline std::vector<std::size_t> all_except(std::size_t total, std::size_t skip) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < total; ++i) {
    if (i != skip) v.push_back(i);
  }
  return v;
}

// Subject nodes [first, last) never beat the centre since every c_{1,i} < 1.
inline void add_subject_verdict(ThresholdReport& r, const std::string& id,
                                const std::vector<double>& row, std::size_t centre,
                                std::size_t first, std::size_t last) {
  if (first >= last) return;
  double worst = 0.0;
  for (std::size_t i = first; i < last; ++i) worst = std::max(worst, row[i - centre]);
  r.verdicts[id] = iff(worst, Relation::Less, 1.0, {centre, range(first, last)});
}

inline ThresholdReport start_report(const VariationSpec& s, VariationKind k) {
  require_kind(s, k);
  ThresholdReport r;
  r.variation = s;
  r.gamma = gamma_closed_form(s).gamma;
  r.predicted_leader = power_ordering(r.gamma).leader;
  return r;
}

inline std::string node_label(std::size_t zero_based) {
  return std::to_string(zero_based + 1);
}

}  // namespace detail

// Single attacker on subject n-1.
inline ThresholdReport threshold_single(const VariationSpec& s) {
  using detail::iff;
  ThresholdReport r = detail::start_report(s, VariationKind::SingleAttack);
  const std::size_t n = s.n;
  const double beta = *s.beta1;
  const double c = s.center_row[n - 2];
  detail::add_subject_verdict(r, "Thm2.i.subjects", s.center_row, 0, 1, n - 2);
  r.verdicts["Thm2.i"] = iff(beta, Relation::Less, 1.0, {n - 2, {n - 1}});
  r.verdicts["Thm2.ii"] = iff(beta, Relation::Less, 1.0 - c, {0, detail::all_except(n, 0)});
  r.verdicts["Thm2.ii.2"] =
      iff(beta, Relation::Greater, 1.0 - c, {n - 2, detail::all_except(n, n - 2)});
  r.verdicts["Thm2.iii"] = iff(beta, Relation::Greater, 1.0 / (1.0 + c), {n - 1, {0}});
  return r;
}

// Two attackers on subject n-2.
inline ThresholdReport threshold_coordinated(const VariationSpec& s) {
  using detail::iff;
  ThresholdReport r = detail::start_report(s, VariationKind::CoordinatedDouble);
  const std::size_t n = s.n;
  const double b1 = *s.beta1, b2 = *s.beta2;
  const double c = s.center_row[n - 3];
  detail::add_subject_verdict(r, "Thm3.i.subjects", s.center_row, 0, 1, n - 3);
  r.verdicts["Thm3.i"] = iff(std::max(b1, b2), Relation::Less, 1.0, {n - 3, {n - 2, n - 1}});
  r.verdicts["Thm3.ii"] =
      iff(b1 + b2, Relation::Less, 1.0 - c, {0, detail::all_except(n, 0)});
  r.verdicts["Thm3.ii.2"] =
      iff(b1 + b2, Relation::Greater, 1.0 - c, {n - 3, detail::all_except(n, n - 3)});
  r.verdicts["Thm3.iii.n"] =
      iff(b2, Relation::Greater, (1.0 - b1) / (1.0 + c), {n - 1, {0}});
  r.verdicts["Thm3.iii.n-1"] =
      iff(b1, Relation::Greater, (1.0 - b2) / (1.0 + c), {n - 2, {0}});
  r.verdicts["Thm3.iv"] = iff(b1, Relation::Greater, b2, {n - 2, {n - 1}});
  return r;
}

// Attacker n-1 on subject n-3, attacker n on subject n-2.
inline ThresholdReport threshold_uncoordinated(const VariationSpec& s) {
  using detail::iff;
  ThresholdReport r = detail::start_report(s, VariationKind::UncoordinatedDouble);
  const std::size_t n = s.n;
  const double b1 = *s.beta1, b2 = *s.beta2;
  const double ca = s.center_row[n - 4];
  const double cb = s.center_row[n - 3];
  detail::add_subject_verdict(r, "Thm4.i.subjects", s.center_row, 0, 1, n - 4);
  r.verdicts["Thm4.i.a"] = iff(b1, Relation::Less, 1.0, {n - 4, {n - 2}});
  r.verdicts["Thm4.i.b"] = iff(b2, Relation::Less, 1.0, {n - 3, {n - 1}});
  r.verdicts["Thm4.ii"] = iff(std::max(b1 - (1.0 - ca), b2 - (1.0 - cb)), Relation::Less,
                              0.0, {0, detail::all_except(n, 0)});
  r.verdicts["Thm4.ii.a"] = iff(b1, Relation::Less, 1.0 - ca, {0, {n - 4}});
  r.verdicts["Thm4.ii.b"] = iff(b2, Relation::Less, 1.0 - cb, {0, {n - 3}});
  r.verdicts["Thm4.iii.1"] = iff(b1, Relation::Greater, 1.0 / (1.0 + ca), {n - 2, {0}});
  r.verdicts["Thm4.iii.2"] = iff(b2, Relation::Greater, 1.0 / (1.0 + cb), {n - 1, {0}});
  r.verdicts["Thm4.iv"] =
      iff((1.0 - b2) / (1.0 - b1), Relation::Greater, cb / ca, {n - 4, {n - 3}});
  return r;
}

// Subjects n-1 and n trusting each other.
//
// Statement (iv) is decided from the closed-form ratio
//   gamma_{n-1} > gamma_n  <=>  c_{1,n-1} + beta2 c_{1,n} > c_{1,n} + beta1 c_{1,n-1};
// the commonly quoted form beta2 > beta1 c_{1,n} + c_{1,n-1}(c_{1,n} - 1) is
// kept as an audit entry only, since it disagrees with the eigenvector.
inline ThresholdReport threshold_dissent(const VariationSpec& s) {
  using detail::iff;
  using detail::make_verdict;
  ThresholdReport r = detail::start_report(s, VariationKind::DissentingSubjects);
  const std::size_t n = s.n;
  const double b1 = *s.beta1, b2 = *s.beta2;
  const double a = s.center_row[n - 2];  // c_{1,n-1}
  const double b = s.center_row[n - 1];  // c_{1,n}
  const double others = 1.0 - a - b;     // sum of c_{1,i}, i = 2..n-2
  const OrderingClaim n_beats_centre{n - 1, {0}};
  const OrderingClaim n1_beats_centre{n - 2, {0}};
  constexpr auto kNecessary = VerdictRole::Necessary;

  detail::add_subject_verdict(r, "Thm5.i", s.center_row, 0, 1, n - 2);
  r.verdicts["Thm5.ii"] = iff(b1, Relation::Greater, (1.0 - b) / (a + b2), n_beats_centre);
  r.verdicts["Thm5.ii.feasible"] =
      make_verdict(b2, Relation::Greater, others, kNecessary, n_beats_centre);
  r.verdicts["Thm5.ii.aux"] =
      make_verdict(b1, Relation::Greater, (1.0 - b) / (1.0 + a), kNecessary, n_beats_centre);
  r.verdicts["Thm5.iii"] = iff(b2, Relation::Greater, (1.0 - a) / (b + b1), n1_beats_centre);
  r.verdicts["Thm5.iii.feasible"] =
      make_verdict(b1, Relation::Greater, others, kNecessary, n1_beats_centre);
  r.verdicts["Thm5.iii.aux"] =
      make_verdict(b2, Relation::Greater, (1.0 - a) / (1.0 + b), kNecessary, n1_beats_centre);
  r.verdicts["Thm5.iv"] = iff(a + b2 * b, Relation::Greater, b + b1 * a, {n - 2, {n - 1}});
  r.verdicts["Thm5.iv.printed"] = make_verdict(b2, Relation::Greater, b1 * b + a * (b - 1.0),
                                               VerdictRole::Audit,
                                               OrderingClaim{n - 2, {n - 1}});
  return r;
}

// Two star centres 1 and n+1 joined into a leadership group.
inline ThresholdReport threshold_leadership(const VariationSpec& s) {
  using detail::iff;
  ThresholdReport r = detail::start_report(s, VariationKind::LeadershipGroup);
  const std::size_t n = s.n;
  const std::size_t m = *s.m;
  const double b1 = *s.beta1, b2 = *s.beta2;
  const auto [r1, r2] = effective_center_rows(s);
  detail::add_subject_verdict(r, "Thm6.i.a", r1, 0, 1, n);
  detail::add_subject_verdict(r, "Thm6.i.b", r2, n, n + 1, n + m);
  r.verdicts["Thm6.ii"] = iff(b2, Relation::Less, b1, {n, {0}});
  for (std::size_t k = 1; k < m; ++k) {
    r.verdicts["Thm6.iii.k=" + detail::node_label(n + k)] =
        iff(r2[k] * (b1 / b2), Relation::Greater, 1.0, {n + k, {0}});
  }
  for (std::size_t i = 1; i < n; ++i) {
    r.verdicts["Thm6.iii.i=" + detail::node_label(i)] =
        iff(r1[i] * (b2 / b1), Relation::Greater, 1.0, {i, {n}});
  }
  return r;
}

// Dispatches on the spec kind. A plain star has no perturbation thresholds;
// its report carries only gamma and the leader.
inline ThresholdReport threshold_report(const VariationSpec& s) {
  switch (s.kind) {
    case VariationKind::Star: return detail::start_report(s, VariationKind::Star);
    case VariationKind::SingleAttack: return threshold_single(s);
    case VariationKind::CoordinatedDouble: return threshold_coordinated(s);
    case VariationKind::UncoordinatedDouble: return threshold_uncoordinated(s);
    case VariationKind::DissentingSubjects: return threshold_dissent(s);
    case VariationKind::LeadershipGroup: return threshold_leadership(s);
  }
  throw PreconditionError("unknown variation kind");
}

// Subject an attacker (or attacker pair) should attach to so that the least
// trust is needed to unseat the centre: the subject the centre trusts most.
// Candidates are nodes 2..n-1 (SingleAttack) or 2..n-2 (CoordinatedDouble)
// of `center_row`; ties go to the lowest index. Returns a 0-based index.
inline std::size_t optimal_placement(const std::vector<double>& center_row,
                                     VariationKind attack_kind) {
  std::size_t end = 0;
  if (attack_kind == VariationKind::SingleAttack) {
    end = center_row.size() - 1;
  } else if (attack_kind == VariationKind::CoordinatedDouble) {
    end = center_row.size() - 2;
  } else {
    throw PreconditionError("optimal_placement supports SingleAttack and CoordinatedDouble");
  }
  if (center_row.size() < minimum_nodes(attack_kind)) {
    throw DimensionError("center row too short for " + std::string(to_string(attack_kind)));
  }
  detail::check_row(center_row, end, 1.0, "center_row");
  std::size_t best = 1;
  for (std::size_t j = 2; j < end; ++j) {
    if (center_row[j] > center_row[best]) best = j;
  }
  return best;
}

}  // namespace dfpower
