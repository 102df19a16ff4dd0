#pragma once

// The command layer behind the CLI: each command takes a validated config,
// writes its CSV files and YAML report under outputs.dir and returns an exit
// code (0 pass, 1 negative verdict, 2 config error, 3 numeric failure,
// 4 inconclusive).

#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "freemult/config_io.hpp"
#include "freemult/errors.hpp"

namespace freemult {

enum ExitCode : int {
  kExitPass = 0,
  kExitNegative = 1,
  kExitConfigError = 2,
  kExitNumericFailure = 3,
  kExitInconclusive = 4,
};

/// The more severe of two exit codes: 2 > 3 > 1 > 4 > 0.
int worse_exit(int a, int b);
std::string_view exit_name(int code);
/// Parse and invariant errors are config errors; every other failure is numeric.
int exit_for(const Error& e);

struct CommandResult {
  int exit_code = kExitPass;
  YAML::Node report;
  std::vector<std::string> files;  // written, in order; the report comes last
  std::string message;             // non-empty on failure
};

CommandResult cmd_density(const ScenarioConfig& cfg);
CommandResult cmd_check(const ScenarioConfig& cfg);
CommandResult cmd_sweep(const ScenarioConfig& cfg);
CommandResult cmd_counterexample(const ScenarioConfig& cfg);
CommandResult cmd_pick(const ScenarioConfig& cfg);

/// Validates cfg and dispatches on cfg.command; never throws for library errors.
CommandResult run_command(const ScenarioConfig& cfg);

/// Names of the scenarios compiled into the binary.
const std::vector<std::string>& bundled_scenarios();
std::string bundled_scenario_text(const std::string& name);

/// `source` is a scenario file, or the name of a bundled scenario. Each run
/// writes into <out_dir>/<NN>_<command>; scenario_report.yaml aggregates them.
CommandResult cmd_scenario(const std::string& source, const std::string& out_dir);

}  // namespace freemult
