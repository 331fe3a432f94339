#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "csck/acceptance.hpp"
#include "csck/bergman.hpp"
#include "csck/geometry.hpp"
#include "csck/invariants.hpp"
#include "csck/io.hpp"
#include "csck/solver.hpp"

namespace {

using csck::io::json;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string format = "json";
  std::optional<int> quad_panels;
  std::optional<double> quad_cutoff;
  std::optional<double> tolerance;
};

csck::io::JobConfig load_job(const CliOptions& opt) {
  auto cfg = csck::io::JobConfig::parse(
      opt.config_path.empty() ? json::object() : csck::io::load_json(opt.config_path));
  if (opt.quad_panels) cfg.quad_panels = *opt.quad_panels;
  if (opt.quad_cutoff) cfg.quad_cutoff = *opt.quad_cutoff;
  if (opt.tolerance) cfg.tolerance = *opt.tolerance;
  return cfg;
}

void emit(const CliOptions& opt, const std::string& name, const json& payload) {
  std::cout << payload.dump(2) << "\n";
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream out(opt.out_dir + "/" + name + ".json");
    out << payload.dump(2) << "\n";
  }
}

void dump_grid_csv(const CliOptions& opt, const std::string& name,
                   const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  if (opt.out_dir.empty()) return;
  std::filesystem::create_directories(opt.out_dir);
  csck::io::write_csv(opt.out_dir + "/" + name + ".csv", header, rows);
}

int run_shat(const CliOptions& opt) {
  const auto cfg = load_job(opt);
  const csck::Rat value = csck::toric::s_hat(cfg.require_tuple());
  std::cout << csck::rat_to_string(value) << "\n";
  if (!opt.out_dir.empty())
    emit(opt, "shat", json{{"s_hat", csck::io::rat_json(value)}});
  return 0;
}

int run_coeffs(const CliOptions& opt) {
  const auto cfg = load_job(opt);
  const auto table = csck::toric::coefficient_table(cfg.require_tuple(), cfg.resolve_action());
  emit(opt, "coeffs", csck::io::table_json(table));
  return 0;
}

int run_futaki(const CliOptions& opt, bool twisted) {
  const auto cfg = load_job(opt);
  const auto mt = cfg.resolve_metric();
  if (twisted && !mt.has_twist())
    throw csck::SchemaError("twisted-futaki needs a metric with twist references");
  const auto action = cfg.resolve_action();
  const auto report = csck::invariants::make_report(mt, action, cfg.tolerance);
  emit(opt, twisted ? "twisted-futaki" : "futaki", csck::io::report_json(report));
  return report.agreement_ok ? 0 : 1;
}

int run_df(const CliOptions& opt) {
  const auto cfg = load_job(opt);
  const auto mt = cfg.resolve_metric();
  const auto action = cfg.resolve_action();
  const auto report = csck::invariants::make_report(mt, action, cfg.tolerance);
  json payload{{"df", csck::io::report_json(report)["df"]},
               {"deltas", csck::io::report_json(report)["deltas"]},
               {"agreement_ok", report.agreement_ok}};
  emit(opt, "df", payload);
  return report.agreement_ok ? 0 : 1;
}

int run_bergman(const CliOptions& opt) {
  const auto cfg = load_job(opt);
  const auto mt = cfg.resolve_metric();
  const auto action = cfg.resolve_action();
  const auto report = csck::bergman::expansion_report(mt, action, cfg.bergman_powers);
  emit(opt, "bergman", csck::io::expansion_json(report));
  for (int k : cfg.bergman_powers) {
    const auto s = csck::bergman::sample(mt, action, k);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
      rows.push_back({s.nodes[i], s.rho[i], s.prediction[i], s.rho[i] - s.prediction[i],
                      s.rho_equivariant[i], s.prediction_equivariant[i],
                      s.rho_equivariant[i] - s.prediction_equivariant[i]});
    dump_grid_csv(opt, "bergman_k" + std::to_string(k),
                  {"t", "rho", "rho_prediction", "rho_residual", "rho_equivariant",
                   "equivariant_prediction", "equivariant_residual"},
                  rows);
  }
  return 0;
}

int run_solve(const CliOptions& opt) {
  const auto cfg = load_job(opt);
  const auto initial = cfg.resolve_metric();
  const auto result = cfg.solve_equation == csck::solver::Equation::coupled_scalar
                          ? csck::solver::solve_coupled_cscK(initial, cfg.solve)
                          : csck::solver::solve_coupled_KE(initial, cfg.solve);
  json payload{{"status", csck::solver::status_name(result.status)},
               {"iterations", result.iterations},
               {"final_residual", result.final_residual},
               {"solution", csck::io::metric_json(result.solution)}};
  emit(opt, "solve", payload);
  std::vector<std::vector<double>> rows;
  for (const auto& row : result.trace)
    rows.push_back({double(row.iteration), row.residual, row.damping});
  dump_grid_csv(opt, "solve_trace", {"iteration", "residual", "damping"}, rows);
  return result.status == csck::solver::Status::converged ? 0 : 1;
}

int run_verify(const CliOptions& opt) {
  const auto results = csck::acceptance::run_all();
  const int failures = csck::acceptance::report(std::cout, results);
  if (!opt.out_dir.empty()) {
    json payload = json::array();
    for (const auto& r : results)
      payload.push_back(json{{"name", r.name},
                             {"passed", r.passed},
                             {"seconds", r.seconds},
                             {"detail", r.detail}});
    emit(opt, "verify", payload);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled scalar-curvature toolkit: invariants, kernels and solvers on line models"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "JSON job configuration");
  app.add_option("--out", opt.out_dir, "output directory for reports and grids");
  app.add_option("--format", opt.format, "json|csv (csv adds grid dumps where available)")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--quad-nodes", opt.quad_panels, "quadrature panel count override");
  app.add_option("--quad-cutoff", opt.quad_cutoff, "quadrature cutoff override");
  app.add_option("--tol", opt.tolerance, "route agreement tolerance override");

  const auto* shat = app.add_subcommand("shat", "exact topological constant of the tuple");
  const auto* coeffs = app.add_subcommand("coeffs", "expansion coefficient table");
  const auto* futaki = app.add_subcommand("futaki", "all character routes with agreement deltas");
  const auto* df = app.add_subcommand("df", "degeneration invariant routes");
  const auto* twisted = app.add_subcommand("twisted-futaki", "twisted character routes");
  const auto* bergman = app.add_subcommand("bergman", "kernel densities and expansion report");
  const auto* solve = app.add_subcommand("solve", "drive the coupled system to a solution");
  const auto* verify = app.add_subcommand("verify", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (shat->parsed()) return run_shat(opt);
    if (coeffs->parsed()) return run_coeffs(opt);
    if (futaki->parsed()) return run_futaki(opt, false);
    if (df->parsed()) return run_df(opt);
    if (twisted->parsed()) return run_futaki(opt, true);
    if (bergman->parsed()) return run_bergman(opt);
    if (solve->parsed()) return run_solve(opt);
    if (verify->parsed()) return run_verify(opt);
  } catch (const csck::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const csck::ScopeError& e) {
    std::cerr << "scope error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
