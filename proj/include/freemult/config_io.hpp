#pragma once

// Scenario and measure files (YAML, schema_version 1), curve CSVs and
// structured reports. All numbers are written with 17 significant digits;
// every file is written to a temporary sibling and renamed into place.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "freemult/analytic.hpp"
#include "freemult/measures.hpp"
#include "freemult/zhong.hpp"

namespace freemult {

inline constexpr int kSchemaVersion = 1;

/// File-level description of a measure; build_measure turns it into a Measure.
struct MeasureSpec {
  MeasureKind kind = MeasureKind::named;
  std::vector<Atom> atoms;                             // atomic
  std::vector<double> x;                               // grid
  std::vector<double> f;                               // grid
  std::string family;                                  // named
  std::vector<std::pair<std::string, double>> params;  // named, canonical order

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

/// Parameter names of a named family in canonical order; ParseError if unknown.
/// Besides the closed-form families, "example48" {N, inverted} expands to the
/// truncated atomic counterexample.
const std::vector<std::string>& family_params(const std::string& family);

Measure build_measure(const MeasureSpec& spec);
MeasureSpec spec_of(const Measure& nu);

/// ParseError (with field path and line) or InvariantViolation.
MeasureSpec parse_measure(const std::string& text);
MeasureSpec parse_measure_node(const YAML::Node& node, const std::string& path);
/// A path to an existing file is read; anything else is parsed as inline YAML.
MeasureSpec measure_from_arg(const std::string& arg);
YAML::Node to_yaml(const MeasureSpec& spec);
std::string serialize_measure(const MeasureSpec& spec);

struct GridConfig {
  int points = 2048;
  std::optional<Interval> window;
};

struct SweepConfig {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<double> R;  // empty: the default 64-value sweep
  int grid = 4096;
};

struct PickConfig {
  std::vector<double> c;  // empty: the detected mode
  HalfPlaneGrid grid;
};

struct CounterexampleConfig {
  int N = 30;
  bool inverted = false;
};

struct OutputConfig {
  std::string dir = ".";
  std::string csv_path;     // CSV file stem; empty: derived from the command
  std::string report_path;  // empty: <command>_report.yaml
};

inline const std::vector<std::string> kCommands = {"density", "check", "sweep", "counterexample", "pick"};
inline const std::vector<std::string> kChecks = {"mass",  "mean",        "symmetry", "logunimodal",
                                                 "pick",  "theta_sweep", "support",  "strong"};

struct ScenarioConfig {
  std::string command = "density";
  std::optional<MeasureSpec> measure;
  std::vector<double> times;
  GridConfig grid;
  std::vector<std::string> checks;
  Tolerances tol;
  OutputConfig outputs;
  SweepConfig sweep;
  PickConfig pick;
  CounterexampleConfig counterexample;
  /// Scenario runs only: the verdict the run must produce ("pass", "negative",
  /// "inconclusive"); a run meeting its expectation counts as passed.
  std::optional<std::string> expect;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<ScenarioConfig> runs;
};

/// Checks the invariants of a config (InvariantViolation with the field path).
void validate(const ScenarioConfig& cfg);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_node(const YAML::Node& node, const std::string& path);
/// A file with "runs" or a single run (a top-level "command").
Scenario parse_scenario(const std::string& text);
YAML::Node to_yaml(const ScenarioConfig& cfg);
YAML::Node to_yaml(const Tolerances& tol);

std::string read_file(const std::string& path);
/// temp + rename; IoError on failure. Parent directories are created.
void write_text_atomic(const std::string& path, const std::string& content);

/// 17 significant digits; .inf / -.inf / .nan for non-finite values.
std::string num(double v);
YAML::Node num_node(double v);
YAML::Node num_list(const std::vector<double>& v);
std::string emit(const YAML::Node& node);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
/// Columns x, q, xq; header only for an empty curve.
void write_curve_csv(const DensityCurve& curve, const std::string& path);
std::pair<std::vector<double>, std::vector<double>> read_curve_csv(const std::string& path);
void write_report(const YAML::Node& report, const std::string& path);

}  // namespace freemult
