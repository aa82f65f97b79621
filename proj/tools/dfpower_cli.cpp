// dfpower: command-line front end for DeGroot-Friedkin social power analysis.
//
// Exit codes: 0 success, 1 validation / input failure, 2 convergence failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dfpower/dfpower.hpp"

namespace {

using namespace dfpower;

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kNoConvergence = 2;

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

json load_json(const std::string& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

int cmd_validate(const std::string& path) {
  const Matrix c = read_matrix_file(path);
  const ValidationReport r = validate(c);
  print(validation_to_json(r, static_cast<std::size_t>(c.rows())));
  return r.ok() ? kOk : kInvalid;
}

int cmd_gamma(const std::string& path, double tol) {
  const InteractionMatrix c(read_matrix_file(path));
  const auto g = dominant_left_eigenvector(c, tol);
  json out{{"gamma", vector_to_json(g.gamma)},
           {"residual", g.residual},
           {"iterations", g.iterations}};
  out["star_center"] = c.report().star_center ? json(*c.report().star_center + 1) : json(nullptr);
  print(out);
  return kOk;
}

int cmd_simulate(const std::string& path, const std::string& x0_arg, double tol,
                 std::size_t max_issues, const std::string& trajectory_out, bool record) {
  const InteractionMatrix c(read_matrix_file(path));
  const SelfWeights x0 =
      x0_arg == "uniform" ? SelfWeights::uniform(c.size()) : self_weights_from_json(load_json(x0_arg));
  EquilibriumOptions opt;
  opt.tol = tol;
  opt.max_issues = max_issues;
  opt.record_states = record || !trajectory_out.empty();
  const auto centre = detect_star(c);
  if (centre) {
    // Stars converge to the centre vertex only asymptotically.
    const std::size_t k = *centre;
    opt.stop = [k](std::size_t, const Vector& x) { return x(static_cast<Eigen::Index>(k)) > 0.99; };
  }
  const IssueTrajectory t = iterate_to_equilibrium(c, x0, opt);
  if (!trajectory_out.empty()) write_text_file(trajectory_out, trajectory_to_csv(t));
  const bool done = t.converged || (centre && t.stopped_early);
  json out{{"x", vector_to_json(t.final_state().values())},
           {"issues", t.issues},
           {"converged", t.converged},
           {"final_residual", t.final_residual}};
  out["star_center"] = centre ? json(*centre + 1) : json(nullptr);
  if (centre) out["center_threshold_reached"] = t.stopped_early;
  print(out);
  return done ? kOk : kNoConvergence;
}

int cmd_build(const std::string& path, const std::string& format) {
  const VariationSpec s = spec_from_json(load_json(path));
  const InteractionMatrix c = build(s);
  if (format == "csv") {
    std::cout << matrix_to_csv(c.matrix());
  } else {
    print(matrix_to_json(c.matrix()));
  }
  return kOk;
}

int cmd_threshold(const std::string& path) {
  print(report_to_json(threshold_report(spec_from_json(load_json(path)))));
  return kOk;
}

int cmd_sweep(const std::string& path, const std::string& out, const std::string& method) {
  SweepConfig cfg = sweep_config_from_json(load_json(path));
  if (!method.empty()) {
    json patch = sweep_config_to_json(cfg);
    patch["method"] = method;
    cfg = sweep_config_from_json(patch);
  }
  const auto rows = run_sweep(cfg);
  const std::string csv = sweep_to_csv(cfg, rows);
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    write_text_file(out, csv);
  }
  for (const auto& r : rows) {
    if (!r.converged) return kNoConvergence;
  }
  return kOk;
}

int cmd_crossover(const std::string& path, const std::vector<std::size_t>& nodes, double tol) {
  if (nodes.size() != 2 || nodes[0] < 1 || nodes[1] < 1) {
    throw PreconditionError("--nodes takes two 1-based node numbers, e.g. 1,7");
  }
  const SweepConfig cfg = sweep_config_from_json(load_json(path));
  const auto p = find_crossover(cfg, nodes[0] - 1, nodes[1] - 1, tol);
  json out{{"nodes", nodes}, {"swept_parameter", to_string(cfg.swept)}};
  out["crossover"] = p ? json(*p) : json(nullptr);
  print(out);
  return kOk;
}

int cmd_verify(const std::string& kind, std::size_t samples, std::uint64_t seed, bool equal_betas) {
  VerifyOptions opt;
  opt.equal_betas = equal_betas;
  const auto sum = verify_variation(parse_variation_kind(kind), samples, seed, opt);
  print(summary_to_json(sum));
  return sum.failed == 0 ? kOk : kInvalid;
}

int cmd_paper(const std::string& dir) {
  json manifest = json::array();
  for (const auto& p : run_paper_experiments(dir)) manifest.push_back(p.string());
  print(json{{"files", manifest}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DeGroot-Friedkin social power: simulation and star-perturbation thresholds"};
  app.require_subcommand(1);

  std::string file, x0 = "uniform", out, format = "json", method, kind;
  double tol = 1e-12;
  double crossover_tol = 1e-12;
  std::size_t max_issues = kDefaultMaxIssues;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  bool equal_betas = false, record = false;
  std::vector<std::size_t> nodes;

  auto* validate_cmd = app.add_subcommand("validate", "Check a relative interaction matrix");
  validate_cmd->add_option("matrix-file", file, "Matrix as JSON or CSV")->required();

  auto* gamma_cmd = app.add_subcommand("gamma", "Dominant left eigenvector of a matrix");
  gamma_cmd->add_option("matrix-file", file, "Matrix as JSON or CSV")->required();
  gamma_cmd->add_option("--tol", tol, "Residual tolerance");

  auto* sim_cmd = app.add_subcommand("simulate", "Iterate self-weights to equilibrium");
  sim_cmd->add_option("matrix-file", file, "Matrix as JSON or CSV")->required();
  sim_cmd->add_option("--x0", x0, "Initial self-weights: JSON file or 'uniform'");
  sim_cmd->add_option("--tol", tol, "Fixed-point tolerance");
  sim_cmd->add_option("--max-issues", max_issues, "Issue cap");
  sim_cmd->add_option("--trajectory", out, "Write the trajectory CSV here");
  sim_cmd->add_flag("--record", record, "Keep every state (implied by --trajectory)");

  auto* build_cmd = app.add_subcommand("build", "Build the matrix of a variation spec");
  build_cmd->add_option("spec-file", file, "Variation spec JSON")->required();
  build_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* thr_cmd = app.add_subcommand("threshold", "Threshold report for a variation spec");
  thr_cmd->add_option("spec-file", file, "Variation spec JSON")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one beta over a grid");
  sweep_cmd->add_option("config-file", file, "Sweep config JSON")->required();
  sweep_cmd->add_option("--out", out, "Output CSV ('-' for stdout)");
  sweep_cmd->add_option("--method", method, "Override the equilibrium method")
      ->check(CLI::IsMember({"closed_form_gamma", "df_iteration", "both"}));

  auto* cross_cmd = app.add_subcommand("crossover", "Parameter where two nodes tie");
  cross_cmd->add_option("config-file", file, "Sweep config JSON")->required();
  cross_cmd->add_option("--nodes", nodes, "Two 1-based node numbers, e.g. 1,7")
      ->required()
      ->delimiter(',')
      ->expected(2);
  cross_cmd->add_option("--tol", crossover_tol, "Tolerance on the gamma difference");

  auto* verify_cmd = app.add_subcommand("verify", "Randomized closed-form vs numeric checks");
  verify_cmd->add_option("kind", kind, "Variation kind, e.g. SingleAttack")->required();
  verify_cmd->add_option("--samples", samples, "Number of random specs");
  verify_cmd->add_option("--seed", seed, "RNG seed");
  verify_cmd->add_flag("--equal-betas", equal_betas, "Draw beta2 = beta1");

  auto* paper_cmd = app.add_subcommand("paper-experiments", "Write fig7/fig8/fig9 sweeps");
  paper_cmd->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate(file);
    if (*gamma_cmd) return cmd_gamma(file, tol);
    if (*sim_cmd) return cmd_simulate(file, x0, tol, max_issues, out, record);
    if (*build_cmd) return cmd_build(file, format);
    if (*thr_cmd) return cmd_threshold(file);
    if (*sweep_cmd) return cmd_sweep(file, out, method);
    if (*cross_cmd) return cmd_crossover(file, nodes, crossover_tol);
    if (*verify_cmd) return cmd_verify(kind, samples, seed, equal_betas);
    if (*paper_cmd) return cmd_paper(out);
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}
