#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "freemult/commands.hpp"
#include "freemult/config_io.hpp"
#include "freemult/errors.hpp"

using namespace freemult;

namespace {

struct Flags {
  std::string config;
  std::string measure;
  std::vector<double> t;
  std::optional<int> points;
  std::vector<double> window;
  std::string out;
  std::optional<double> tol_root;
  std::optional<double> tol_quad;
  bool seedless = false;
  std::vector<std::string> checks;
  std::string csv;
  std::string report;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<double> R;
  std::optional<int> sweep_grid;
  std::vector<double> c;
  std::optional<int> N;
  bool inverted = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Run config file (YAML); flags override its fields");
  sub->add_option("--measure", f.measure, "Measure spec: a YAML file or inline YAML");
  sub->add_option("--t", f.t, "Comma-separated times t > 0")->delimiter(',');
  sub->add_option("--points", f.points, "Density grid points (>= 64)");
  sub->add_option("--window", f.window, "r-window lo,hi for the V-set and solution search")
      ->delimiter(',')
      ->expected(2);
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--tol-root", f.tol_root, "Relative residual of implicit-equation solves");
  sub->add_option("--tol-quad", f.tol_quad, "Relative quadrature tolerance");
  sub->add_flag("--seedless", f.seedless, "Accepted for compatibility; every run is deterministic");
  sub->add_option("--checks", f.checks, "Comma-separated checks")->delimiter(',');
  sub->add_option("--csv", f.csv, "CSV file stem");
  sub->add_option("--report", f.report, "Report file name");
}

ScenarioConfig build_config(const std::string& command, const Flags& f) {
  ScenarioConfig cfg;
  if (!f.config.empty()) {
    cfg = parse_config(read_file(f.config));
    if (cfg.command != command) {
      fail(ErrorCode::InvariantViolation,
           "command: config is for '" + cfg.command + "' but the '" + command + "' subcommand was used");
    }
  }
  cfg.command = command;
  if (!f.measure.empty()) cfg.measure = measure_from_arg(f.measure);
  if (!f.t.empty()) cfg.times = f.t;
  if (f.points) cfg.grid.points = *f.points;
  if (f.window.size() == 2) cfg.grid.window = Interval{f.window[0], f.window[1]};
  if (!f.out.empty()) cfg.outputs.dir = f.out;
  if (f.tol_root) cfg.tol.tol_root = *f.tol_root;
  if (f.tol_quad) cfg.tol.tol_quad = *f.tol_quad;
  if (!f.checks.empty()) cfg.checks = f.checks;
  if (!f.csv.empty()) cfg.outputs.csv_path = f.csv;
  if (!f.report.empty()) cfg.outputs.report_path = f.report;
  if (f.alpha) cfg.sweep.alpha = f.alpha;
  if (f.beta) cfg.sweep.beta = f.beta;
  if (!f.R.empty()) cfg.sweep.R = f.R;
  if (f.sweep_grid) cfg.sweep.grid = *f.sweep_grid;
  if (!f.c.empty()) cfg.pick.c = f.c;
  if (f.N) cfg.counterexample.N = *f.N;
  if (f.inverted) cfg.counterexample.inverted = true;
  return cfg;
}

int report_result(const CommandResult& r) {
  for (const auto& file : r.files) std::cout << "wrote " << file << "\n";
  if (!r.message.empty()) std::cerr << "error: " << r.message << "\n";
  std::cout << exit_name(r.exit_code) << " (exit " << r.exit_code << ")\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densities and log-unimodality checks for free positive multiplicative Brownian motion"};
  app.require_subcommand(1);
  Flags f;

  auto* density = app.add_subcommand("density", "Density curves q_t of sigma_t [x] nu with checks");
  auto* check = app.add_subcommand("check", "Log-unimodality, Pick and strong checks of a measure");
  auto* sweep = app.add_subcommand("sweep", "Theta_R solution counts over an R sweep");
  auto* counter = app.add_subcommand("counterexample", "Gap certificates and densities for the atomic counterexample");
  auto* pick = app.add_subcommand("pick", "Pick-inequality checks on a half-plane grid");
  auto* scenario = app.add_subcommand("scenario", "Run a scenario file or a bundled scenario");
  for (auto* sub : {density, check, sweep, counter, pick}) add_common(sub, f);

  sweep->add_option("--alpha", f.alpha, "Lower support bound");
  sweep->add_option("--beta", f.beta, "Upper support bound");
  sweep->add_option("--R", f.R, "Comma-separated R values in (0, pi)")->delimiter(',');
  sweep->add_option("--grid", f.sweep_grid, "Log-grid size for solution counting");
  check->add_option("--c", f.c, "Comma-separated Pick centers")->delimiter(',');
  pick->add_option("--c", f.c, "Comma-separated Pick centers")->delimiter(',');
  density->add_option("--c", f.c, "Pick center for the pick check")->delimiter(',');
  counter->add_option("--N", f.N, "Number of atoms (>= 3)");
  counter->add_flag("--inverted", f.inverted, "Use the inverted atoms 1/a_n");

  std::string scenario_source;
  std::string scenario_out = "scenario_out";
  bool list = false;
  scenario->add_option("source", scenario_source, "Scenario file or bundled name");
  scenario->add_option("--out", scenario_out, "Output directory");
  scenario->add_flag("--list", list, "List bundled scenarios");
  scenario->add_flag("--seedless", f.seedless, "Accepted for compatibility; every run is deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (scenario->parsed()) {
      if (list) {
        for (const auto& name : bundled_scenarios()) std::cout << name << "\n";
        return kExitPass;
      }
      if (scenario_source.empty()) {
        std::cerr << "error: scenario needs a file or a bundled name\n";
        return kExitConfigError;
      }
      return report_result(cmd_scenario(scenario_source, scenario_out));
    }
    for (auto* sub : {density, check, sweep, counter, pick}) {
      if (sub->parsed()) return report_result(run_command(build_config(sub->get_name(), f)));
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericFailure;
  }
  return kExitConfigError;
}
