#pragma once

// Parameter sweeps, crossover search, randomized verification and the
// reproduction of the three reference sweeps (fig7 / fig8 / fig9).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dfpower/analysis.hpp"
#include "dfpower/dynamics.hpp"
#include "dfpower/errors.hpp"
#include "dfpower/graph_core.hpp"
#include "dfpower/io.hpp"
#include "dfpower/topology.hpp"

namespace dfpower {

enum class SweptParameter { Beta1, Beta2 };
enum class EquilibriumMethod { ClosedFormGamma, DfIteration, Both };

inline const char* to_string(SweptParameter p) {
  return p == SweptParameter::Beta1 ? "beta1" : "beta2";
}

inline const char* to_string(EquilibriumMethod m) {
  switch (m) {
    case EquilibriumMethod::ClosedFormGamma: return "closed_form_gamma";
    case EquilibriumMethod::DfIteration: return "df_iteration";
    case EquilibriumMethod::Both: return "both";
  }
  return "?";
}

struct Grid {
  double start = 0.01;
  double stop = 0.99;
  double step = 0.01;
};

struct SweepConfig {
  VariationSpec spec;  // the swept beta is overwritten per grid point
  SweptParameter swept = SweptParameter::Beta1;
  Grid grid;
  EquilibriumMethod method = EquilibriumMethod::ClosedFormGamma;
};

inline constexpr double kSweepTolerance = 1e-12;
inline constexpr std::size_t kSweepMaxIssues = 100'000;
inline constexpr double kOrderingMargin = 1e-6;

struct SweepRow {
  double parameter = 0.0;
  std::optional<Vector> gamma;   // closed form
  std::optional<Vector> x_star;  // DF iteration
  std::vector<std::size_t> leader;
  std::map<std::string, Verdict> verdicts;
  bool converged = true;
  std::size_t issues = 0;
  // Pairs whose gamma gap exceeds kOrderingMargin but whose x* order
  // disagrees; only with EquilibriumMethod::Both.
  std::optional<std::size_t> ordering_mismatches;
  std::optional<bool> leader_agree;

  const Vector& power() const { return x_star ? *x_star : *gamma; }
};

// Grid points inside [max(start, step), min(stop, 1 - step)], rounded to 12
// decimals so that e.g. 0.7 is the double nearest 0.7.
inline std::vector<double> grid_points(const Grid& g) {
  if (!(g.step > 0.0)) throw PreconditionError("grid step must be positive");
  if (!(g.start < g.stop)) throw PreconditionError("grid start must be below stop");
  const double lo = std::max(g.start, g.step);
  const double hi = std::min(g.stop, 1.0 - g.step);
  std::vector<double> out;
  const auto count = static_cast<long long>(std::floor((hi - lo) / g.step + 1e-9));
  for (long long k = 0; k <= count; ++k) {
    const double v = std::round((lo + static_cast<double>(k) * g.step) * 1e12) / 1e12;
    if (v > 0.0 && v < 1.0) out.push_back(v);
  }
  return out;
}

inline VariationSpec spec_at(const SweepConfig& cfg, double value) {
  VariationSpec s = cfg.spec;
  if (cfg.swept == SweptParameter::Beta1) {
    s.beta1 = value;
  } else {
    s.beta2 = value;
  }
  return s;
}

namespace detail {

inline std::size_t count_ordering_mismatches(const Vector& gamma, const Vector& x,
                                             double margin) {
  std::size_t bad = 0;
  for (Eigen::Index i = 0; i < gamma.size(); ++i) {
    for (Eigen::Index j = i + 1; j < gamma.size(); ++j) {
      const double dg = gamma(i) - gamma(j);
      if (std::abs(dg) <= margin) continue;
      const double dx = x(i) - x(j);
      if ((dg > 0) != (dx > 0) || dx == 0.0) ++bad;
    }
  }
  return bad;
}

inline std::string point_name(const SweepConfig& cfg, double v) {
  return std::string(to_string(cfg.swept)) + " = " + format_double(v);
}

}  // namespace detail

inline SweepRow evaluate_point(const SweepConfig& cfg, double value) {
  const VariationSpec s = spec_at(cfg, value);
  SweepRow row;
  row.parameter = value;
  try {
    validate_spec(s);
  } catch (const Error& e) {
    throw ConstraintError("grid point " + detail::point_name(cfg, value) + ": " + e.what());
  }
  const ThresholdReport report = threshold_report(s);
  row.verdicts = report.verdicts;
  const bool want_gamma = cfg.method != EquilibriumMethod::DfIteration;
  const bool want_x = cfg.method != EquilibriumMethod::ClosedFormGamma;
  if (want_gamma) row.gamma = report.gamma;
  if (want_x) {
    const InteractionMatrix c = build(s);
    EquilibriumOptions opt;
    opt.tol = kSweepTolerance;
    opt.max_issues = kSweepMaxIssues;
    const IssueTrajectory t = iterate_to_equilibrium(c, SelfWeights::uniform(c.size()), opt);
    row.x_star = t.final_state().values();
    row.converged = t.converged;
    row.issues = t.issues;
  }
  row.leader = power_ordering(want_gamma ? *row.gamma : *row.x_star).leader;
  if (want_gamma && want_x) {
    row.ordering_mismatches =
        detail::count_ordering_mismatches(*row.gamma, *row.x_star, kOrderingMargin);
    row.leader_agree = power_ordering(*row.x_star).leader == row.leader;
  }
  return row;
}

// One row per grid point in ascending parameter order.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.spec.kind == VariationKind::Star) {
    throw PreconditionError("a plain star has no beta to sweep");
  }
  if (cfg.spec.kind == VariationKind::SingleAttack && cfg.swept != SweptParameter::Beta1) {
    throw PreconditionError("SingleAttack sweeps beta1 only");
  }
  std::vector<SweepRow> rows;
  for (double v : grid_points(cfg.grid)) rows.push_back(evaluate_point(cfg, v));
  return rows;
}

// Parameter in the clipped grid range where gamma_a = gamma_b, by bisection
// on the closed-form difference until |gamma_a - gamma_b| <= tol. Absent
// when the difference has the same sign at both ends of the range.
inline std::optional<double> find_crossover(const SweepConfig& cfg, std::size_t node_a,
                                            std::size_t node_b, double tol = 1e-12) {
  if (!(tol > 0.0)) throw PreconditionError("crossover tolerance must be positive");
  const auto pts = grid_points(cfg.grid);
  if (pts.empty()) return std::nullopt;
  const std::size_t total = cfg.spec.node_count();
  if (node_a >= total || node_b >= total) throw DimensionError("crossover node out of range");
  auto diff = [&](double p) {
    const VariationSpec s = spec_at(cfg, p);
    try {
      validate_spec(s);
    } catch (const Error& e) {
      throw ConstraintError("crossover point " + detail::point_name(cfg, p) + ": " + e.what());
    }
    const Vector g = gamma_closed_form(s).gamma;
    return g(static_cast<Eigen::Index>(node_a)) - g(static_cast<Eigen::Index>(node_b));
  };
  double lo = pts.front();
  double hi = pts.back();
  double d_lo = diff(lo);
  const double d_hi = diff(hi);
  if (std::abs(d_lo) <= tol) return lo;
  if (std::abs(d_hi) <= tol) return hi;
  if ((d_lo > 0) == (d_hi > 0)) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    const double d_mid = diff(mid);
    if (std::abs(d_mid) <= tol) return mid;
    if ((d_mid > 0) == (d_lo > 0)) {
      lo = mid;
      d_lo = d_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---- randomized verification --------------------------------------------

struct VerifyOptions {
  bool equal_betas = false;  // draw beta2 = beta1
  std::size_t max_nodes = 10;
};

struct VerificationSummary {
  VariationKind kind = VariationKind::SingleAttack;
  std::size_t samples = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t gamma_failures = 0;      // closed form vs numeric > 1e-10
  std::size_t verdict_mismatches = 0;  // verdict vs closed-form gamma claim
  std::size_t ordering_mismatches = 0; // gamma order vs x* order
  std::size_t convergence_failures = 0;
  std::size_t verdicts_checked = 0;
  std::size_t ties_excluded = 0;       // verdicts within 1e-6 of critical
  std::size_t samples_with_ties = 0;   // samples with a verdict tie (<= 1e-9)
  double worst_gamma_discrepancy = 0.0;
  std::vector<std::string> failures;   // first few, for diagnosis
};

inline constexpr double kGammaAgreement = 1e-10;

namespace detail {

// Flat simplex draw over `k` slots, floored at 0.01 and renormalized so the
// result sums to `total`.
template <class Rng>
std::vector<double> random_weights(Rng& rng, std::size_t k, double total) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& v : w) sum += (v = expo(rng));
  double floored = 0.0;
  for (double& v : w) floored += (v = std::max(v / sum, 0.01));
  for (double& v : w) v = v / floored * total;
  return w;
}

template <class Rng>
std::vector<double> random_center_row(Rng& rng, std::size_t n, std::size_t positive_end,
                                      double total) {
  std::vector<double> row(n, 0.0);
  const auto w = random_weights(rng, positive_end - 1, total);
  for (std::size_t j = 1; j < positive_end; ++j) row[j] = w[j - 1];
  return row;
}

}  // namespace detail

// Random valid spec of the given kind: betas uniform on [0.05, 0.95], centre
// weights from a floored flat simplex draw.
template <class Rng>
VariationSpec random_spec(VariationKind kind, Rng& rng, const VerifyOptions& opt = {}) {
  std::uniform_real_distribution<double> beta(0.05, 0.95);
  const std::size_t lo = minimum_nodes(kind);
  const std::size_t hi = std::max(lo, opt.max_nodes);
  std::uniform_int_distribution<std::size_t> size(lo, hi);
  auto draw_betas = [&](VariationSpec& s) {
    for (;;) {
      const double b1 = beta(rng);
      const double b2 = opt.equal_betas ? b1 : beta(rng);
      if (kind == VariationKind::CoordinatedDouble && !(b1 + b2 < 1.0)) continue;
      s.beta1 = b1;
      if (kind != VariationKind::SingleAttack && kind != VariationKind::Star) s.beta2 = b2;
      return;
    }
  };
  VariationSpec s;
  s.kind = kind;
  switch (kind) {
    case VariationKind::Star:
      s.n = size(rng);
      s.center_row = detail::random_center_row(rng, s.n, s.n, 1.0);
      break;
    case VariationKind::SingleAttack:
      s.n = size(rng);
      s.center_row = detail::random_center_row(rng, s.n, s.n - 1, 1.0);
      draw_betas(s);
      break;
    case VariationKind::CoordinatedDouble:
    case VariationKind::UncoordinatedDouble:
      s.n = size(rng);
      s.center_row = detail::random_center_row(rng, s.n, s.n - 2, 1.0);
      draw_betas(s);
      break;
    case VariationKind::DissentingSubjects:
      s.n = size(rng);
      s.center_row = detail::random_center_row(rng, s.n, s.n, 1.0);
      draw_betas(s);
      break;
    case VariationKind::LeadershipGroup: {
      const std::size_t half = std::max<std::size_t>(3, hi / 2);
      std::uniform_int_distribution<std::size_t> part(3, half);
      s.n = part(rng);
      s.m = part(rng);
      draw_betas(s);
      s.center_row = detail::random_center_row(rng, s.n, s.n, 1.0 - *s.beta1);
      s.center_row_2 = detail::random_center_row(rng, *s.m, *s.m, 1.0 - *s.beta2);
      break;
    }
  }
  return s;
}

// All three checks for one spec; tallies into `sum`. Returns true on pass.
inline bool verify_spec(const VariationSpec& s, VerificationSummary& sum) {
  bool ok = true;
  auto fail = [&](std::string why) {
    ok = false;
    if (sum.failures.size() < 10) sum.failures.push_back(std::move(why));
  };

  const InteractionMatrix c = build(s);
  const Vector closed = gamma_closed_form(s).gamma;
  const Vector numeric = dominant_left_eigenvector(c).gamma;
  const double disc = (closed - numeric).cwiseAbs().maxCoeff();
  sum.worst_gamma_discrepancy = std::max(sum.worst_gamma_discrepancy, disc);
  if (disc > kGammaAgreement) {
    ++sum.gamma_failures;
    fail("closed-form gamma differs from eigenvector by " + format_double(disc));
  }

  const ThresholdReport report = threshold_report(s);
  bool any_tie = false;
  for (const auto& [id, v] : report.verdicts) {
    any_tie = any_tie || v.tie;
    if (!v.claim || v.role == VerdictRole::Audit) continue;
    if (std::abs(v.lhs - v.critical) <= kOrderingMargin) {
      ++sum.ties_excluded;
      continue;
    }
    ++sum.verdicts_checked;
    const bool claim = evaluate_claim(*v.claim, closed, 0.0).value_or(false);
    const bool consistent =
        v.role == VerdictRole::Equivalence ? v.holds == claim : (!claim || v.holds);
    if (!consistent) {
      ++sum.verdict_mismatches;
      fail(id + ": verdict " + (v.holds ? "true" : "false") + " but gamma ordering " +
           (claim ? "true" : "false"));
    }
  }
  if (any_tie) ++sum.samples_with_ties;

  const SelfWeights x0 = SelfWeights::uniform(c.size());
  if (s.kind == VariationKind::Star) {
    EquilibriumOptions opt;
    opt.stop = [](std::size_t, const Vector& x) { return x(0) > 0.99; };
    const IssueTrajectory t = iterate_to_equilibrium(c, x0, opt);
    if (!(t.final_state()[0] > 0.99)) {
      ++sum.convergence_failures;
      fail("star centre did not pass 0.99");
    }
  } else {
    EquilibriumOptions opt;
    opt.tol = kSweepTolerance;
    opt.max_issues = kSweepMaxIssues;
    const IssueTrajectory t = iterate_to_equilibrium(c, x0, opt);
    if (!t.converged) {
      ++sum.convergence_failures;
      fail("DF iteration did not converge, residual " + format_double(t.final_residual));
    } else {
      const std::size_t bad = detail::count_ordering_mismatches(
          closed, t.final_state().values(), kOrderingMargin);
      if (bad) {
        sum.ordering_mismatches += bad;
        fail(std::to_string(bad) + " gamma/x* ordering mismatches");
      }
    }
  }
  ++sum.samples;
  ++(ok ? sum.passed : sum.failed);
  return ok;
}

inline VerificationSummary verify_variation(VariationKind kind, std::size_t samples,
                                            std::uint64_t seed,
                                            const VerifyOptions& opt = {}) {
  if (samples == 0) throw PreconditionError("samples must be positive");
  std::mt19937_64 rng(seed);
  VerificationSummary sum;
  sum.kind = kind;
  for (std::size_t i = 0; i < samples; ++i) verify_spec(random_spec(kind, rng, opt), sum);
  return sum;
}

// ---- output --------------------------------------------------------------

inline std::string leader_label(const std::vector<std::size_t>& leader) {
  std::string out;
  for (std::size_t i : leader) {
    if (!out.empty()) out += '|';
    out += std::to_string(i + 1);
  }
  return out;
}

inline const char* verdict_cell(const Verdict& v) {
  return v.tie ? "tie" : (v.holds ? "true" : "false");
}

// Parameter column, x_star_i and/or gamma_i columns, leader, then one column
// per threshold statement.
inline std::string sweep_to_csv(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  const std::size_t n = cfg.spec.node_count();
  const bool with_gamma = cfg.method != EquilibriumMethod::DfIteration;
  const bool with_x = cfg.method != EquilibriumMethod::ClosedFormGamma;
  std::string out = to_string(cfg.swept);
  if (with_x) {
    for (std::size_t i = 1; i <= n; ++i) out += ",x_star_" + std::to_string(i);
  }
  if (with_gamma) {
    for (std::size_t i = 1; i <= n; ++i) out += ",gamma_" + std::to_string(i);
  }
  out += ",leader";
  if (with_x) out += ",converged";
  if (with_x && with_gamma) out += ",ordering_mismatches";
  std::vector<std::string> ids;
  if (!rows.empty()) {
    for (const auto& [id, v] : rows.front().verdicts) {
      ids.push_back(id);
      out += ',' + id;
    }
  }
  out += '\n';
  for (const SweepRow& r : rows) {
    out += format_double(r.parameter);
    if (with_x) {
      for (Eigen::Index i = 0; i < r.x_star->size(); ++i) out += ',' + format_double((*r.x_star)(i));
    }
    if (with_gamma) {
      for (Eigen::Index i = 0; i < r.gamma->size(); ++i) out += ',' + format_double((*r.gamma)(i));
    }
    out += ',' + leader_label(r.leader);
    if (with_x) out += r.converged ? ",true" : ",false";
    if (with_x && with_gamma) out += ',' + std::to_string(*r.ordering_mismatches);
    for (const auto& id : ids) out += std::string(",") + verdict_cell(r.verdicts.at(id));
    out += '\n';
  }
  return out;
}

inline json sweep_config_to_json(const SweepConfig& cfg) {
  return json{{"spec", spec_to_json(cfg.spec)},
              {"swept_parameter", to_string(cfg.swept)},
              {"grid", {{"start", cfg.grid.start}, {"stop", cfg.grid.stop}, {"step", cfg.grid.step}}},
              {"method", to_string(cfg.method)}};
}

inline SweepConfig sweep_config_from_json(const json& j) {
  try {
    SweepConfig cfg;
    cfg.spec = spec_from_json(j.at("spec"));
    const std::string p = j.value("swept_parameter", std::string("beta1"));
    if (p == "beta1") {
      cfg.swept = SweptParameter::Beta1;
    } else if (p == "beta2") {
      cfg.swept = SweptParameter::Beta2;
    } else {
      throw FormatError("swept_parameter must be beta1 or beta2, got " + p);
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      cfg.grid.start = g.value("start", cfg.grid.start);
      cfg.grid.stop = g.value("stop", cfg.grid.stop);
      cfg.grid.step = g.value("step", cfg.grid.step);
    }
    const std::string m = j.value("method", std::string("closed_form_gamma"));
    if (m == "closed_form_gamma") {
      cfg.method = EquilibriumMethod::ClosedFormGamma;
    } else if (m == "df_iteration") {
      cfg.method = EquilibriumMethod::DfIteration;
    } else if (m == "both") {
      cfg.method = EquilibriumMethod::Both;
    } else {
      throw FormatError("unknown equilibrium method " + m);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw FormatError(std::string("sweep config: ") + e.what());
  }
}

inline json summary_to_json(const VerificationSummary& s) {
  return json{{"kind", std::string(to_string(s.kind))},
              {"samples", s.samples},
              {"passed", s.passed},
              {"failed", s.failed},
              {"gamma_failures", s.gamma_failures},
              {"verdict_mismatches", s.verdict_mismatches},
              {"ordering_mismatches", s.ordering_mismatches},
              {"convergence_failures", s.convergence_failures},
              {"verdicts_checked", s.verdicts_checked},
              {"ties_excluded", s.ties_excluded},
              {"samples_with_ties", s.samples_with_ties},
              {"worst_gamma_discrepancy", s.worst_gamma_discrepancy},
              {"failures", s.failures}};
}

// ---- reference sweeps -----------------------------------------------------

inline const std::vector<double>& single_attack_reference_row() {
  static const std::vector<double> row{0, 0.15, 0.15, 0.2, 0.05, 0.15, 0.3, 0};
  return row;
}

inline const std::vector<double>& dissent_reference_row() {
  static const std::vector<double> row{0, 0.1, 0.1, 0.2, 0.05, 0.05, 0.2, 0.3};
  return row;
}

// fig7: single attacker on node 7, sweep beta = c_78.
inline SweepConfig fig7_config() {
  SweepConfig cfg;
  cfg.spec = VariationSpec::single_attack(single_attack_reference_row(), 0.5);
  cfg.spec.beta1.reset();
  cfg.swept = SweptParameter::Beta1;
  cfg.method = EquilibriumMethod::Both;
  return cfg;
}

// fig8 / fig9: dissenting subjects 7 and 8, sweep beta1 = c_78 with
// beta2 = c_87 fixed.
inline SweepConfig dissent_config(double beta2) {
  SweepConfig cfg;
  cfg.spec = VariationSpec::two_betas(VariationKind::DissentingSubjects,
                                      dissent_reference_row(), 0.5, beta2);
  cfg.spec.beta1.reset();
  cfg.swept = SweptParameter::Beta1;
  cfg.method = EquilibriumMethod::Both;
  return cfg;
}

inline SweepConfig fig8_config() { return dissent_config(0.49); }
inline SweepConfig fig9_config() { return dissent_config(0.55); }

// Header `beta,x_star_1,...,x_star_n,leader`; leader is decided by gamma.
inline std::string reference_csv(const std::vector<SweepRow>& rows) {
  const std::size_t n = rows.empty() ? 0 : static_cast<std::size_t>(rows.front().power().size());
  std::string out = "beta";
  for (std::size_t i = 1; i <= n; ++i) out += ",x_star_" + std::to_string(i);
  out += ",leader\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.parameter);
    const Vector& x = r.power();
    for (Eigen::Index i = 0; i < x.size(); ++i) out += ',' + format_double(x(i));
    out += ',' + leader_label(r.leader) + '\n';
  }
  return out;
}

// Writes fig7.csv, fig8.csv, fig9.csv and their fig*.json config sidecars.
inline std::vector<std::filesystem::path> run_paper_experiments(
    const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::vector<std::pair<std::string, SweepConfig>> runs{
      {"fig7", fig7_config()}, {"fig8", fig8_config()}, {"fig9", fig9_config()}};
  std::vector<std::filesystem::path> manifest;
  for (const auto& [name, cfg] : runs) {
    const auto rows = run_sweep(cfg);
    const auto csv = dir / (name + ".csv");
    const auto sidecar = dir / (name + ".json");
    write_text_file(csv, reference_csv(rows));
    write_text_file(sidecar, sweep_config_to_json(cfg).dump(2) + "\n");
    manifest.push_back(csv);
    manifest.push_back(sidecar);
  }
  return manifest;
}

}  // namespace dfpower
