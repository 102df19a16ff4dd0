#include "freemult/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <optional>

#include "freemult/criteria.hpp"
#include "freemult/errors.hpp"
#include "freemult/unimodality.hpp"
#include "freemult/zhong.hpp"
#include "parallel.hpp"

namespace freemult {

namespace fs = std::filesystem;

int worse_exit(int a, int b) {
  auto rank = [](int c) {
    switch (c) {
      case kExitConfigError: return 4;
      case kExitNumericFailure: return 3;
      case kExitNegative: return 2;
      case kExitInconclusive: return 1;
      default: return 0;
    }
  };
  return rank(a) >= rank(b) ? a : b;
}

std::string_view exit_name(int code) {
  switch (code) {
    case kExitPass: return "pass";
    case kExitNegative: return "negative";
    case kExitConfigError: return "config_error";
    case kExitNumericFailure: return "numeric_failure";
    case kExitInconclusive: return "inconclusive";
    default: return "unknown";
  }
}

int exit_for(const Error& e) {
  return (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvariantViolation) ? kExitConfigError
                                                                                          : kExitNumericFailure;
}

namespace {

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::unimodal: return kExitPass;
    case Verdict::not_unimodal: return kExitNegative;
    case Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

int bool_exit(bool ok) { return ok ? kExitPass : kExitNegative; }

std::string tol_summary(const Tolerances& t) {
  return "[tol_root=" + num(t.tol_root) + ", tol_quad=" + num(t.tol_quad) + ", tol_tail=" + num(t.tol_tail) +
         ", tol_int=" + num(t.tol_int) + "]";
}

std::string out_path(const ScenarioConfig& cfg, const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute()) return p.string();
  return (fs::path(cfg.outputs.dir) / p).string();
}

std::string stem(const ScenarioConfig& cfg, const std::string& fallback) {
  return cfg.outputs.csv_path.empty() ? fallback : cfg.outputs.csv_path;
}

YAML::Node interval_list(const std::vector<Interval>& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (const auto& i : v) n.push_back(num_list({i.lo, i.hi}));
  return n;
}

YAML::Node string_list(const std::vector<std::string>& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (const auto& s : v) n.push_back(s);
  return n;
}

YAML::Node mode_node(const ModeReport& m) {
  YAML::Node n;
  n["verdict"] = std::string(to_string(m.verdict));
  n["num_local_maxima"] = m.num_local_maxima;
  n["modes"] = num_list(m.modes);
  n["max_level_crossings"] = m.max_level_crossings;
  n["resolution"] = num(m.resolution);
  n["hysteresis_abs"] = num(m.tolerance);
  if (!m.note.empty()) n["note"] = m.note;
  return n;
}

YAML::Node pick_node(double c, const PickReport& p, const std::string& csv) {
  YAML::Node n;
  n["c"] = num(c);
  n["holds"] = p.holds;
  n["evidence"] = p.evidence;
  n["violations"] = static_cast<int>(p.violations.size());
  n["extreme"] = num(p.extreme);
  n["scale"] = num(p.scale);
  n["tolerance"] = num(p.tolerance);
  if (!csv.empty()) n["csv"] = csv;
  return n;
}

YAML::Node strong_node(double b, const StrongCheck& s) {
  YAML::Node n;
  n["b"] = num(b);
  n["cos_b"] = num(s.cos_b);
  n["strongly_log_unimodal"] = s.strongly_log_unimodal;
  if (s.witness) {
    n["witness"] = num(*s.witness);
    n["g_second_at_witness"] = num(s.g_second(*s.witness));
  }
  return n;
}

YAML::Node sweep_node(const CriterionReport& r) {
  YAML::Node n;
  n["R_values"] = static_cast<int>(r.R.size());
  n["max_count"] = r.max_count;
  int boundary = 0;
  for (const auto& c : r.counts) boundary += c.boundary ? 1 : 0;
  n["boundary_cases"] = boundary;
  n["at_most_two"] = r.verdict;
  return n;
}

// Short form for file names; reports carry the full 17 digits.
std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string write_pick_csv(const ScenarioConfig& cfg, const std::string& base, double c, const PickReport& p) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& v : p.violations) rows.push_back({num(v.z.real()), num(v.z.imag()), num(v.value)});
  const auto path = out_path(cfg, base + "_c" + tag(c) + ".csv");
  write_csv(path, {"re", "im", "value"}, rows);
  return path;
}

const family::Lambda* as_lambda(const Measure& nu) {
  const auto* f = nu.family();
  return f ? std::get_if<family::Lambda>(f) : nullptr;
}

// Builds the common report skeleton; results are filled in by the command.
YAML::Node report_skeleton(const ScenarioConfig& cfg) {
  YAML::Node r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = cfg.command;
  r["inputs"] = to_yaml(cfg);
  r["tolerances"] = to_yaml(cfg.tol);
  return r;
}

void finish(CommandResult& res, const ScenarioConfig& cfg, const std::vector<std::string>& warnings) {
  res.report["warnings"] = string_list(warnings);
  if (warnings.empty()) res.report["warnings"].SetStyle(YAML::EmitterStyle::Flow);
  res.report["exit_code"] = res.exit_code;
  res.report["verdict"] = std::string(exit_name(res.exit_code));
  if (!res.message.empty()) res.report["error"] = res.message;
  const auto path = out_path(cfg, cfg.outputs.report_path.empty() ? cfg.command + "_report.yaml" : cfg.outputs.report_path);
  write_report(res.report, path);
  res.files.push_back(path);
}

double log_interp(const DensityCurve& c, double x) {
  if (c.x.empty() || x < c.x.front() || x > c.x.back()) return 0.0;
  const auto it = std::lower_bound(c.x.begin(), c.x.end(), x);
  const auto j = static_cast<std::size_t>(it - c.x.begin());
  if (j == 0) return c.x[0] * c.q[0];
  const double y0 = std::log(c.x[j - 1]);
  const double y1 = std::log(c.x[j]);
  const double w = y1 > y0 ? (std::log(x) - y0) / (y1 - y0) : 0.0;
  return (1.0 - w) * c.x[j - 1] * c.q[j - 1] + w * c.x[j] * c.q[j];
}

// sup over the curve nodes of |p(y) - p(-y)| for the log-pushforward p(y) = x q(x).
double log_asymmetry(const DensityCurve& c) {
  double sup = 0.0;
  for (std::size_t i = 0; i < c.x.size(); ++i) {
    sup = std::max(sup, std::abs(c.x[i] * c.q[i] - log_interp(c, 1.0 / c.x[i])));
  }
  return sup;
}

constexpr double kMeanRelTol = 1e-3;
constexpr double kSymmetryTol = 1e-3;
constexpr double kMeasureSymmetryTol = 1e-3;

struct DensityItem {
  std::optional<DensityCurve> curve;
  std::optional<ModeReport> mode;
  std::optional<PickReport> pick;
  double pick_c = 0.0;
  std::string pick_skipped;
  std::optional<CriterionReport> sweep;
  std::string error;
  int error_exit = kExitPass;
};

}  // namespace

CommandResult cmd_density(const ScenarioConfig& cfg) {
  CommandResult res;
  res.report = report_skeleton(cfg);
  std::vector<std::string> warnings;
  const auto nu = build_measure(*cfg.measure);
  const auto checks = cfg.checks.empty() ? std::vector<std::string>{"mass", "support", "logunimodal"} : cfg.checks;
  auto want = [&](const char* c) { return std::find(checks.begin(), checks.end(), c) != checks.end(); };

  std::optional<double> m1;
  if (want("mean")) {
    try {
      const double m = integrate(nu, [](double x) { return x; }, cfg.tol);
      if (std::isfinite(m)) m1 = m;
    } catch (const Error&) {
    }
    if (!m1) warnings.push_back("mean: first moment of the measure is not finite; check skipped");
  }
  const auto sweep_R = cfg.sweep.R.empty() ? default_R_sweep() : cfg.sweep.R;

  const auto items = detail::parallel_map<DensityItem>(cfg.times.size(), [&](std::size_t i) {
    DensityItem item;
    const double t = cfg.times[i];
    std::string op = "density_curve";
    try {
      const ZhongContext ctx(nu, t, cfg.tol);
      item.curve = density_curve(ctx, {.points = cfg.grid.points, .window = cfg.grid.window});
      if (want("logunimodal") || (want("pick") && cfg.pick.c.empty())) {
        op = "is_log_unimodal";
        item.mode = is_log_unimodal(*item.curve, cfg.tol.hysteresis);
      }
      if (want("pick")) {
        op = "pick_inequality_check";
        if (!cfg.pick.c.empty()) item.pick_c = cfg.pick.c.front();
        else if (item.mode && item.mode->verdict == Verdict::unimodal && !item.mode->modes.empty())
          item.pick_c = item.mode->modes.front();
        if (item.pick_c > 0.0) {
          const auto mu = Measure::grid_normalized(item.curve->x, item.curve->q);
          item.pick = pick_inequality_check(mu, item.pick_c, cfg.pick.grid, cfg.tol);
        } else {
          item.pick_skipped = "no single mode detected and pick.c not given";
        }
      }
      if (want("theta_sweep")) {
        op = "theta_sweep";
        item.sweep = theta_sweep(nu, t, sweep_R, cfg.grid.window, cfg.sweep.grid, cfg.tol);
      }
    } catch (const Error& e) {
      item.error = op + " (t = " + num(t) + "): " + e.what() + " " + tol_summary(cfg.tol);
      item.error_exit = exit_for(e);
    }
    return item;
  });

  YAML::Node runs(YAML::NodeType::Sequence);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const double t = cfg.times[i];
    YAML::Node r;
    r["t"] = num(t);
    if (item.curve) {
      const auto& c = *item.curve;
      const auto csv = out_path(cfg, stem(cfg, "density") + "_t" + tag(t) + ".csv");
      write_curve_csv(c, csv);
      res.files.push_back(csv);
      r["csv"] = csv;
      r["points"] = static_cast<int>(c.x.size());
      r["r_window"] = num_list({c.meta.window.lo, c.meta.window.hi});
      r["support"] = interval_list(c.support.intervals);
      YAML::Node soft(YAML::NodeType::Sequence);
      for (const auto& [lo, hi] : c.soft_ends) {
        YAML::Node e(YAML::NodeType::Sequence);
        e.push_back(lo);
        e.push_back(hi);
        e.SetStyle(YAML::EmitterStyle::Flow);
        soft.push_back(e);
      }
      r["soft_ends"] = soft;
      r["integral"] = num(c.integral());
      r["mean"] = num(c.mean());
      r["lambda_monotone"] = c.meta.lambda_monotone;
      if (!c.meta.merges.empty()) r["merges"] = string_list(c.meta.merges);
      for (const auto& w : c.meta.warnings) warnings.push_back("t = " + num(t) + ": " + w);

      YAML::Node ch;
      for (const auto& name : checks) {
        YAML::Node n;
        if (name == "mass") {
          const double err = std::abs(c.integral() - 1.0);
          n["error"] = num(err);
          n["tolerance"] = num(cfg.tol.tol_int);
          n["pass"] = err <= cfg.tol.tol_int;
          res.exit_code = worse_exit(res.exit_code, bool_exit(err <= cfg.tol.tol_int));
        } else if (name == "mean") {
          if (!m1) continue;
          const double want_mean = std::exp(t / 2.0) * *m1;
          const double rel = std::abs(c.mean() - want_mean) / want_mean;
          n["expected"] = num(want_mean);
          n["relative_error"] = num(rel);
          n["tolerance"] = num(kMeanRelTol);
          n["pass"] = rel <= kMeanRelTol;
          res.exit_code = worse_exit(res.exit_code, bool_exit(rel <= kMeanRelTol));
        } else if (name == "symmetry") {
          const double sup = log_asymmetry(c);
          n["sup_asymmetry"] = num(sup);
          n["tolerance"] = num(kSymmetryTol);
          n["pass"] = sup <= kSymmetryTol;
          res.exit_code = worse_exit(res.exit_code, bool_exit(sup <= kSymmetryTol));
        } else if (name == "support") {
          n["components"] = static_cast<int>(c.support.intervals.size());
          n["pass"] = true;
        } else if (name == "logunimodal" && item.mode) {
          n = mode_node(*item.mode);
          res.exit_code = worse_exit(res.exit_code, verdict_exit(item.mode->verdict));
        } else if (name == "pick" && item.pick) {
          const auto csv = write_pick_csv(cfg, stem(cfg, "density") + "_t" + tag(t) + "_pick", item.pick_c, *item.pick);
          res.files.push_back(csv);
          n = pick_node(item.pick_c, *item.pick, csv);
          res.exit_code = worse_exit(res.exit_code, bool_exit(item.pick->holds));
        } else if (name == "pick" && !item.pick_skipped.empty()) {
          n["skipped"] = item.pick_skipped;
          res.exit_code = worse_exit(res.exit_code, kExitInconclusive);
        } else if (name == "theta_sweep" && item.sweep) {
          n = sweep_node(*item.sweep);
          res.exit_code = worse_exit(res.exit_code, bool_exit(item.sweep->verdict));
        } else if (name == "strong") {
          if (const auto* lam = as_lambda(nu)) {
            const auto s = lambda_strong_check(lam->b);
            n = strong_node(lam->b, s);
            res.exit_code = worse_exit(res.exit_code, bool_exit(s.strongly_log_unimodal));
          } else {
            if (i == 0) warnings.push_back("strong: applies to lambda measures only; skipped");
            continue;
          }
        } else {
          continue;
        }
        ch[name] = n;
      }
      r["checks"] = ch;
    }
    if (!item.error.empty()) {
      r["error"] = item.error;
      res.exit_code = worse_exit(res.exit_code, item.error_exit);
      if (res.message.empty()) res.message = item.error;
    }
    runs.push_back(r);
  }
  res.report["measure"] = nu.describe();
  res.report["truncation"]["tol_tail"] = num(cfg.tol.tol_tail);
  res.report["truncation"]["points"] = cfg.grid.points;
  res.report["results"] = runs;
  finish(res, cfg, warnings);
  return res;
}

CommandResult cmd_check(const ScenarioConfig& cfg) {
  CommandResult res;
  res.report = report_skeleton(cfg);
  std::vector<std::string> warnings;
  const auto nu = build_measure(*cfg.measure);
  const auto* lam = as_lambda(nu);
  auto checks = cfg.checks;
  if (checks.empty()) {
    checks = {"logunimodal", "pick"};
    if (lam) checks.push_back("strong");
  }
  res.report["measure"] = nu.describe();
  YAML::Node results;
  std::optional<ModeReport> mode;
  try {
    if (std::find(checks.begin(), checks.end(), "logunimodal") != checks.end() ||
        (std::find(checks.begin(), checks.end(), "pick") != checks.end() && cfg.pick.c.empty())) {
      mode = is_log_unimodal(nu, cfg.tol.hysteresis);
    }
    for (const auto& name : checks) {
      if (name == "logunimodal") {
        results["logunimodal"] = mode_node(*mode);
        res.exit_code = worse_exit(res.exit_code, verdict_exit(mode->verdict));
      } else if (name == "pick") {
        std::vector<double> cs = cfg.pick.c;
        if (cs.empty() && mode && mode->verdict == Verdict::unimodal && !mode->modes.empty()) cs = {mode->modes.front()};
        if (cs.empty()) {
          results["pick"]["skipped"] = "no single mode detected and pick.c not given";
          res.exit_code = worse_exit(res.exit_code, kExitInconclusive);
          continue;
        }
        const auto reports = detail::parallel_map<PickReport>(
            cs.size(), [&](std::size_t k) { return pick_inequality_check(nu, cs[k], cfg.pick.grid, cfg.tol); });
        YAML::Node list(YAML::NodeType::Sequence);
        for (std::size_t k = 0; k < cs.size(); ++k) {
          const auto csv = write_pick_csv(cfg, stem(cfg, "check_pick"), cs[k], reports[k]);
          res.files.push_back(csv);
          list.push_back(pick_node(cs[k], reports[k], csv));
          res.exit_code = worse_exit(res.exit_code, bool_exit(reports[k].holds));
        }
        results["pick"] = list;
      } else if (name == "strong") {
        if (!lam) {
          warnings.push_back("strong: applies to lambda measures only; skipped");
          continue;
        }
        const auto s = lambda_strong_check(lam->b);
        results["strong"] = strong_node(lam->b, s);
        res.exit_code = worse_exit(res.exit_code, bool_exit(s.strongly_log_unimodal));
      } else if (name == "symmetry") {
        const bool sym = is_mult_symmetric(nu, kMeasureSymmetryTol);
        results["symmetry"]["pass"] = sym;
        results["symmetry"]["tolerance"] = num(kMeasureSymmetryTol);
        res.exit_code = worse_exit(res.exit_code, bool_exit(sym));
      } else if (name == "support") {
        results["support"]["hull"] = num_list({nu.support().lo, nu.support().hi});
        std::vector<Interval> runs(nu.positive_runs().begin(), nu.positive_runs().end());
        results["support"]["positive_runs"] = interval_list(runs);
        results["support"]["pass"] = true;
      } else {
        warnings.push_back(name + ": not available for check; use density or sweep");
      }
    }
  } catch (const Error& e) {
    res.message = "check: " + std::string(e.what()) + " " + tol_summary(cfg.tol);
    res.exit_code = worse_exit(res.exit_code, exit_for(e));
  }
  res.report["results"] = results;
  finish(res, cfg, warnings);
  return res;
}

CommandResult cmd_sweep(const ScenarioConfig& cfg) {
  CommandResult res;
  res.report = report_skeleton(cfg);
  std::vector<std::string> warnings;
  const auto nu = build_measure(*cfg.measure);
  res.report["measure"] = nu.describe();
  const auto R = cfg.sweep.R.empty() ? default_R_sweep() : cfg.sweep.R;

  std::optional<double> alpha = cfg.sweep.alpha;
  std::optional<double> beta = cfg.sweep.beta;
  const auto hull = nu.support();
  if (!alpha && hull.lo > 0.0) alpha = hull.lo;
  if (!beta && std::isfinite(hull.hi)) beta = hull.hi;
  std::optional<double> D;
  YAML::Node hyp;
  if (alpha && beta) {
    hyp["alpha"] = num(*alpha);
    hyp["beta"] = num(*beta);
    try {
      const double d = d_bound(*alpha, *beta);
      hyp["D"] = num(d);
      if (std::isfinite(d)) D = d;
      else warnings.push_back("HypothesisViolated: D(alpha, beta) is not finite for these support bounds");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisViolated) throw;
      warnings.push_back(e.what());
      hyp["D"] = num(kInf);
    }
  } else {
    warnings.push_back("support bounds not available; D(alpha, beta) not evaluated");
  }
  res.report["hypothesis"] = hyp;

  struct Item {
    std::optional<CriterionReport> sweep;
    std::optional<GapCheck> gap;
    std::string error;
    int error_exit = kExitPass;
  };
  const auto items = detail::parallel_map<Item>(cfg.times.size(), [&](std::size_t i) {
    Item item;
    const double t = cfg.times[i];
    std::string op = "theta_sweep";
    try {
      item.sweep = theta_sweep(nu, t, R, cfg.grid.window, cfg.sweep.grid, cfg.tol);
      if (D && t >= *D) {
        op = "case2_gap_check";
        item.gap = case2_gap_check(nu, *alpha, *beta, t, 64, cfg.tol);
      }
    } catch (const Error& e) {
      item.error = op + " (t = " + num(t) + "): " + e.what() + " " + tol_summary(cfg.tol);
      item.error_exit = exit_for(e);
    }
    return item;
  });

  std::vector<std::vector<std::string>> rows;
  YAML::Node runs(YAML::NodeType::Sequence);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const double t = cfg.times[i];
    YAML::Node r;
    r["t"] = num(t);
    if (item.sweep) {
      const auto& s = *item.sweep;
      for (std::size_t k = 0; k < s.R.size(); ++k) {
        const auto& c = s.counts[k];
        std::string locs;
        for (std::size_t j = 0; j < c.locations.size(); ++j) locs += (j ? ";" : "") + num(c.locations[j]);
        rows.push_back({num(t), num(s.R[k]), std::to_string(c.count), std::to_string(c.count_with_multiplicity),
                        c.boundary ? "1" : "0", locs});
      }
      r["sweep"] = sweep_node(s);
      r["log_unimodal"] = s.verdict;
      res.exit_code = worse_exit(res.exit_code, bool_exit(s.verdict));
    }
    if (item.gap) {
      r["case2_gap_check"]["holds"] = item.gap->holds;
      r["case2_gap_check"]["min_margin"] = num(item.gap->min_margin);
      r["case2_gap_check"]["cos_threshold"] = num(item.gap->cos_threshold);
      r["case2_gap_check"]["samples"] = item.gap->samples;
      res.exit_code = worse_exit(res.exit_code, bool_exit(item.gap->holds));
    }
    if (!item.error.empty()) {
      r["error"] = item.error;
      res.exit_code = worse_exit(res.exit_code, item.error_exit);
      if (res.message.empty()) res.message = item.error;
    }
    runs.push_back(r);
  }
  const auto csv = out_path(cfg, stem(cfg, "sweep") + ".csv");
  write_csv(csv, {"t", "R", "count", "multiplicity", "boundary", "locations"}, rows);
  res.files.push_back(csv);
  res.report["csv"] = csv;
  res.report["solution_grid"] = cfg.sweep.grid;
  res.report["results"] = runs;
  finish(res, cfg, warnings);
  return res;
}

CommandResult cmd_counterexample(const ScenarioConfig& cfg) {
  CommandResult res;
  res.report = report_skeleton(cfg);
  std::vector<std::string> warnings;
  std::optional<CounterexampleSpec> spec;
  std::optional<Measure> nu_opt;
  if (cfg.measure) {
    nu_opt = build_measure(*cfg.measure);
  } else {
    auto [m, s] = build_counterexample(cfg.counterexample.N, example48_rules(), cfg.counterexample.inverted);
    nu_opt = std::move(m);
    spec = std::move(s);
  }
  const Measure& nu = *nu_opt;
  res.report["measure"] = nu.describe();
  if (spec) {
    const double bound = 315.0 / (2.0 * std::pow(std::numbers::pi, 4));
    YAML::Node s;
    s["family"] = spec->family;
    s["N"] = spec->N;
    s["inverted"] = spec->inverted;
    s["raw_mass"] = num(spec->raw_mass);
    s["remainder_mass"] = num(spec->remainder_mass);
    s["locations_decreasing"] = spec->decreasing;
    s["ratios_decreasing"] = spec->ratios_decreasing;
    s["partial_sum_w_over_a"] = num(spec->partial_sum_w_over_a);
    s["series_limit"] = num(bound);
    s["partial_sum_below_limit"] = spec->partial_sum_w_over_a < bound;
    res.report["counterexample"] = s;
    res.report["truncation"]["N"] = spec->N;
  }

  struct Item {
    std::optional<GapCertificate> cert;
    std::optional<DensityCurve> curve;
    std::optional<ModeReport> mode;
    std::string error;
    int error_exit = kExitPass;
  };
  const auto items = detail::parallel_map<Item>(cfg.times.size(), [&](std::size_t i) {
    Item item;
    const double t = cfg.times[i];
    std::string op = "first_gap_certificate";
    try {
      item.cert = first_gap_certificate(nu, t, cfg.tol);
      op = "density_curve";
      item.curve = density_curve(ZhongContext(nu, t, cfg.tol), {.points = cfg.grid.points, .window = cfg.grid.window});
      op = "is_log_unimodal";
      item.mode = is_log_unimodal(*item.curve, cfg.tol.hysteresis);
    } catch (const Error& e) {
      item.error = op + " (t = " + num(t) + "): " + e.what() + " " + tol_summary(cfg.tol);
      item.error_exit = exit_for(e);
    }
    return item;
  });

  std::vector<std::vector<std::string>> cert_rows;
  YAML::Node runs(YAML::NodeType::Sequence);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const double t = cfg.times[i];
    YAML::Node r;
    r["t"] = num(t);
    bool confirmed = true;
    if (item.cert) {
      r["certificate"]["k"] = item.cert->k;
      r["certificate"]["b_k"] = num(item.cert->b_k);
      r["certificate"]["f_at_b_k"] = num(item.cert->f_at_bk);
      r["certificate"]["one_over_t"] = num(1.0 / t);
      cert_rows.push_back({num(t), std::to_string(item.cert->k), num(item.cert->b_k), num(item.cert->f_at_bk)});
    } else {
      r["certificate"] = YAML::Node(YAML::NodeType::Null);
      confirmed = false;
    }
    if (item.curve) {
      const auto csv = out_path(cfg, stem(cfg, "counterexample") + "_t" + tag(t) + ".csv");
      write_curve_csv(*item.curve, csv);
      res.files.push_back(csv);
      r["csv"] = csv;
      r["support"] = interval_list(item.curve->support.intervals);
      r["support_components"] = static_cast<int>(item.curve->support.intervals.size());
      r["integral"] = num(item.curve->integral());
      confirmed = confirmed && item.curve->support.intervals.size() >= 2;
    }
    if (item.mode) {
      r["logunimodal"] = mode_node(*item.mode);
      confirmed = confirmed && item.mode->verdict == Verdict::not_unimodal;
    }
    if (!item.error.empty()) {
      r["error"] = item.error;
      res.exit_code = worse_exit(res.exit_code, item.error_exit);
      if (res.message.empty()) res.message = item.error;
    } else {
      const bool undecided = item.mode && item.mode->verdict == Verdict::inconclusive;
      res.exit_code = worse_exit(res.exit_code, confirmed ? kExitPass : (undecided ? kExitInconclusive : kExitNegative));
    }
    r["confirmed"] = confirmed && item.error.empty();
    runs.push_back(r);
  }
  const auto csv = out_path(cfg, stem(cfg, "counterexample") + "_certificates.csv");
  write_csv(csv, {"t", "k", "b_k", "f_at_b_k"}, cert_rows);
  res.files.push_back(csv);
  res.report["results"] = runs;
  finish(res, cfg, warnings);
  return res;
}

CommandResult cmd_pick(const ScenarioConfig& cfg) {
  CommandResult res;
  res.report = report_skeleton(cfg);
  std::vector<std::string> warnings;
  const auto nu = build_measure(*cfg.measure);
  res.report["measure"] = nu.describe();
  std::vector<double> cs = cfg.pick.c;
  try {
    if (cs.empty()) {
      if (!nu.has_density()) fail(ErrorCode::InvariantViolation, "pick.c: required for measures without a density");
      const auto mode = is_log_unimodal(nu, cfg.tol.hysteresis);
      res.report["detected_mode"] = mode_node(mode);
      if (mode.verdict != Verdict::unimodal || mode.modes.empty()) {
        warnings.push_back("no single mode detected; give pick.c explicitly");
        res.exit_code = kExitInconclusive;
      } else {
        cs = {mode.modes.front()};
      }
    }
    const auto reports = detail::parallel_map<PickReport>(
        cs.size(), [&](std::size_t k) { return pick_inequality_check(nu, cs[k], cfg.pick.grid, cfg.tol); });
    YAML::Node list(YAML::NodeType::Sequence);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const auto csv = write_pick_csv(cfg, stem(cfg, "pick"), cs[k], reports[k]);
      res.files.push_back(csv);
      list.push_back(pick_node(cs[k], reports[k], csv));
      res.exit_code = worse_exit(res.exit_code, bool_exit(reports[k].holds));
    }
    res.report["results"] = list;
  } catch (const Error& e) {
    res.message = "pick_inequality_check: " + std::string(e.what()) + " " + tol_summary(cfg.tol);
    res.exit_code = worse_exit(res.exit_code, exit_for(e));
  }
  finish(res, cfg, warnings);
  return res;
}

CommandResult run_command(const ScenarioConfig& cfg) {
  try {
    validate(cfg);
    if (cfg.command == "density") return cmd_density(cfg);
    if (cfg.command == "check") return cmd_check(cfg);
    if (cfg.command == "sweep") return cmd_sweep(cfg);
    if (cfg.command == "counterexample") return cmd_counterexample(cfg);
    if (cfg.command == "pick") return cmd_pick(cfg);
    fail(ErrorCode::InvariantViolation, "command: unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    CommandResult res;
    res.exit_code = exit_for(e);
    res.message = cfg.command + ": " + e.what();
    return res;
  }
}

// --- scenarios ------------------------------------------------------------------

namespace {

constexpr const char* kTheorem42 = R"(schema_version: 1
name: theorem42
description: Lambda(pi/2) is strongly log-unimodal, so its free multiplicative Brownian motion stays log-unimodal.
runs:
  - command: density
    measure: {kind: named, family: lambda, params: {b: 1.5707963267948966}}
    times: [0.25, 1, 4]
    grid: {points: 4096}
    checks: [mass, support, logunimodal]
    expect: pass
)";

constexpr const char* kTheorem45 = R"(schema_version: 1
name: theorem45
description: The truncated example48 atoms give a disconnected support and a non-log-unimodal law at every t.
runs:
  - command: counterexample
    times: [0.5, 1, 2]
    counterexample: {N: 30, inverted: false}
    expect: pass
  - command: density
    measure: {kind: named, family: example48, params: {N: 30}}
    times: [1]
    checks: [support, logunimodal]
    expect: negative
)";

}  // namespace

const std::vector<std::string>& bundled_scenarios() {
  static const std::vector<std::string> names = {"theorem42", "theorem45"};
  return names;
}

std::string bundled_scenario_text(const std::string& name) {
  if (name == "theorem42") return kTheorem42;
  if (name == "theorem45") return kTheorem45;
  fail(ErrorCode::IoError, "no bundled scenario named '" + name + "'");
}

CommandResult cmd_scenario(const std::string& source, const std::string& out_dir) {
  CommandResult res;
  Scenario sc;
  try {
    std::error_code ec;
    std::string text;
    if (fs::is_regular_file(source, ec)) {
      text = read_file(source);
    } else if (std::find(bundled_scenarios().begin(), bundled_scenarios().end(), source) != bundled_scenarios().end()) {
      text = bundled_scenario_text(source);
    } else {
      fail(ErrorCode::ParseError, "scenario '" + source + "': no such file or bundled scenario");
    }
    sc = parse_scenario(text);
  } catch (const Error& e) {
    res.exit_code = kExitConfigError;
    res.message = e.what();
    return res;
  }

  YAML::Node runs(YAML::NodeType::Sequence);
  for (std::size_t i = 0; i < sc.runs.size(); ++i) {
    auto cfg = sc.runs[i];
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i + 1);
    const fs::path sub(cfg.outputs.dir);
    cfg.outputs.dir = sub.is_absolute() ? sub.string()
                                        : (fs::path(out_dir) / (prefix + cfg.command) / sub).lexically_normal().string();
    const auto r = run_command(cfg);
    res.files.insert(res.files.end(), r.files.begin(), r.files.end());
    YAML::Node n;
    n["command"] = cfg.command;
    n["exit_code"] = r.exit_code;
    n["verdict"] = std::string(exit_name(r.exit_code));
    int contributes = r.exit_code;
    if (cfg.expect) {
      const bool met = exit_name(r.exit_code) == *cfg.expect;
      n["expect"] = *cfg.expect;
      n["met"] = met;
      if (r.exit_code != kExitConfigError && r.exit_code != kExitNumericFailure) {
        contributes = met ? kExitPass : kExitNegative;
      }
    }
    if (!r.message.empty()) {
      n["error"] = r.message;
      if (res.message.empty()) res.message = r.message;
    }
    if (!r.files.empty()) n["report"] = r.files.back();
    res.exit_code = worse_exit(res.exit_code, contributes);
    runs.push_back(n);
  }
  res.report["schema_version"] = kSchemaVersion;
  res.report["command"] = "scenario";
  res.report["scenario"] = sc.name;
  res.report["description"] = sc.description;
  res.report["runs"] = runs;
  res.report["exit_code"] = res.exit_code;
  res.report["verdict"] = std::string(exit_name(res.exit_code));
  const auto path = (fs::path(out_dir) / "scenario_report.yaml").string();
  try {
    write_report(res.report, path);
    res.files.push_back(path);
  } catch (const Error& e) {
    res.exit_code = worse_exit(res.exit_code, kExitNumericFailure);
    res.message = e.what();
  }
  return res;
}

}  // namespace freemult
