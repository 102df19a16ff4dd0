#include "freemult/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "freemult/criteria.hpp"
#include "freemult/errors.hpp"

namespace freemult {

namespace fs = std::filesystem;

namespace {

std::string where(const YAML::Node& n, const std::string& path) {
  std::string out = path.empty() ? "<root>" : path;
  if (n.IsDefined() && n.Mark().line >= 0) out += " (line " + std::to_string(n.Mark().line + 1) + ")";
  return out;
}

[[noreturn]] void parse_error(const YAML::Node& n, const std::string& path, const std::string& msg) {
  fail(ErrorCode::ParseError, where(n, path) + ": " + msg);
}

[[noreturn]] void invariant(const std::string& path, const std::string& msg) {
  fail(ErrorCode::InvariantViolation, (path.empty() ? "<root>" : path) + ": " + msg);
}

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void require_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) parse_error(n, path, "expected a mapping");
}

void check_keys(const YAML::Node& n, const std::string& path, const std::vector<std::string>& allowed) {
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      parse_error(kv.first, join(path, key), "unknown field");
    }
  }
}

double get_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) parse_error(n, path, "expected a number");
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    parse_error(n, path, "expected a number, got '" + n.Scalar() + "'");
  }
}

int get_int(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) parse_error(n, path, "expected an integer");
  try {
    return n.as<int>();
  } catch (const YAML::Exception&) {
    parse_error(n, path, "expected an integer, got '" + n.Scalar() + "'");
  }
}

bool get_bool(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) parse_error(n, path, "expected true or false");
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    parse_error(n, path, "expected true or false, got '" + n.Scalar() + "'");
  }
}

std::string get_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) parse_error(n, path, "expected a string");
  return n.Scalar();
}

std::vector<double> get_doubles(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) parse_error(n, path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(get_double(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::string> get_strings(const YAML::Node& n, const std::string& path) {
  if (!n.IsSequence()) parse_error(n, path, "expected a list of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(get_string(n[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Interval get_interval(const YAML::Node& n, const std::string& path) {
  const auto v = get_doubles(n, path);
  if (v.size() != 2) parse_error(n, path, "expected [lo, hi]");
  return {v[0], v[1]};
}

YAML::Node load(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorCode::ParseError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

void check_schema(const YAML::Node& n, const std::string& path) {
  if (const auto v = n["schema_version"]) {
    if (get_int(v, join(path, "schema_version")) != kSchemaVersion) {
      parse_error(v, join(path, "schema_version"), "unsupported schema version (expected 1)");
    }
  }
}

const std::map<std::string, std::vector<std::string>>& family_table() {
  static const std::map<std::string, std::vector<std::string>> t = {
      {"dirac", {"c"}},
      {"lambda", {"b"}},
      {"half_normal", {"t"}},
      {"gamma", {"p", "theta"}},
      {"beta", {"p", "q"}},
      {"marchenko_pastur", {}},
      {"marchenko_pastur_inverse", {}},
      {"boolean_stable", {"alpha"}},
      {"uniform", {"alpha", "beta"}},
      {"log_normal", {"m", "s"}},
      {"example48", {"N", "inverted"}},
  };
  return t;
}

double param(const MeasureSpec& s, const std::string& name) {
  for (const auto& [k, v] : s.params) {
    if (k == name) return v;
  }
  fail(ErrorCode::ParseError, "measure.params." + name + ": missing");
}

}  // namespace

const std::vector<std::string>& family_params(const std::string& family) {
  const auto& t = family_table();
  const auto it = t.find(family);
  if (it == t.end()) fail(ErrorCode::ParseError, "unknown family '" + family + "'");
  return it->second;
}

Measure build_measure(const MeasureSpec& s) {
  switch (s.kind) {
    case MeasureKind::atomic: return Measure::atomic(s.atoms);
    case MeasureKind::grid: return Measure::grid(s.x, s.f);
    case MeasureKind::named: break;
  }
  (void)family_params(s.family);
  const auto& f = s.family;
  if (f == "dirac") return Measure::dirac(param(s, "c"));
  if (f == "lambda") return Measure::lambda(param(s, "b"));
  if (f == "half_normal") return Measure::half_normal(param(s, "t"));
  if (f == "gamma") return Measure::gamma(param(s, "p"), param(s, "theta"));
  if (f == "beta") return Measure::beta(param(s, "p"), param(s, "q"));
  if (f == "marchenko_pastur") return Measure::marchenko_pastur();
  if (f == "marchenko_pastur_inverse") return Measure::marchenko_pastur_inverse();
  if (f == "boolean_stable") return Measure::boolean_stable(param(s, "alpha"));
  if (f == "uniform") return Measure::uniform(param(s, "alpha"), param(s, "beta"));
  if (f == "log_normal") return Measure::log_normal(param(s, "m"), param(s, "s"));
  const double N = param(s, "N");
  if (!(N >= 3.0) || N != std::floor(N) || N > 1e6) invariant("measure.params.N", "N must be an integer >= 3");
  return build_counterexample(static_cast<int>(N), example48_rules(), param(s, "inverted") != 0.0).first;
}

MeasureSpec spec_of(const Measure& nu) {
  MeasureSpec s;
  s.kind = nu.kind();
  if (s.kind == MeasureKind::grid) {
    s.x.assign(nu.grid_x().begin(), nu.grid_x().end());
    s.f.assign(nu.grid_f().begin(), nu.grid_f().end());
    return s;
  }
  const auto* fam = nu.family();
  if (fam == nullptr) {
    s.kind = MeasureKind::atomic;
    s.atoms.assign(nu.atoms().begin(), nu.atoms().end());
    return s;
  }
  s.family = family_name(*fam);
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Dirac>) s.params = {{"c", f.c}};
        if constexpr (std::is_same_v<T, family::Lambda>) s.params = {{"b", f.b}};
        if constexpr (std::is_same_v<T, family::HalfNormal>) s.params = {{"t", f.t}};
        if constexpr (std::is_same_v<T, family::Gamma>) s.params = {{"p", f.p}, {"theta", f.theta}};
        if constexpr (std::is_same_v<T, family::Beta>) s.params = {{"p", f.p}, {"q", f.q}};
        if constexpr (std::is_same_v<T, family::BooleanStable>) s.params = {{"alpha", f.alpha}};
        if constexpr (std::is_same_v<T, family::UniformInterval>) s.params = {{"alpha", f.lo}, {"beta", f.hi}};
        if constexpr (std::is_same_v<T, family::LogNormal>) s.params = {{"m", f.m}, {"s", f.s}};
      },
      *fam);
  return s;
}

MeasureSpec parse_measure_node(const YAML::Node& n, const std::string& path) {
  require_map(n, path);
  const auto kind_node = n["kind"];
  if (!kind_node) parse_error(n, join(path, "kind"), "missing (atomic, grid or named)");
  const auto kind = get_string(kind_node, join(path, "kind"));
  MeasureSpec s;
  if (kind == "atomic") {
    check_keys(n, path, {"schema_version", "kind", "atoms"});
    s.kind = MeasureKind::atomic;
    const auto atoms = n["atoms"];
    const auto ap = join(path, "atoms");
    if (!atoms) parse_error(n, ap, "missing");
    if (!atoms.IsSequence()) parse_error(atoms, ap, "expected a list of {w, a}");
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const auto p = ap + "[" + std::to_string(i) + "]";
      require_map(atoms[i], p);
      check_keys(atoms[i], p, {"w", "a"});
      if (!atoms[i]["w"] || !atoms[i]["a"]) parse_error(atoms[i], p, "needs both w and a");
      s.atoms.push_back({get_double(atoms[i]["w"], p + ".w"), get_double(atoms[i]["a"], p + ".a")});
    }
  } else if (kind == "grid") {
    check_keys(n, path, {"schema_version", "kind", "grid"});
    s.kind = MeasureKind::grid;
    const auto g = n["grid"];
    const auto gp = join(path, "grid");
    if (!g) parse_error(n, gp, "missing");
    require_map(g, gp);
    check_keys(g, gp, {"x", "f"});
    if (!g["x"] || !g["f"]) parse_error(g, gp, "needs both x and f");
    s.x = get_doubles(g["x"], gp + ".x");
    s.f = get_doubles(g["f"], gp + ".f");
  } else if (kind == "named") {
    check_keys(n, path, {"schema_version", "kind", "family", "params"});
    s.kind = MeasureKind::named;
    const auto fp = join(path, "family");
    if (!n["family"]) parse_error(n, fp, "missing");
    s.family = get_string(n["family"], fp);
    const auto& t = family_table();
    if (t.find(s.family) == t.end()) parse_error(n["family"], fp, "unknown family '" + s.family + "'");
    const auto& names = t.at(s.family);
    const auto params = n["params"];
    const auto pp = join(path, "params");
    if (params) {
      if (!(params.IsMap() || (params.IsNull() && names.empty()))) parse_error(params, pp, "expected a mapping");
      if (params.IsMap()) check_keys(params, pp, names);
    }
    for (const auto& name : names) {
      const auto v = params ? params[name] : YAML::Node();
      if (!v) {
        if (s.family == "example48" && name == "inverted") {
          s.params.emplace_back(name, 0.0);
          continue;
        }
        parse_error(params ? params : n, join(pp, name), "missing");
      }
      const double value = (name == "inverted") ? (get_bool(v, join(pp, name)) ? 1.0 : 0.0)
                                                : (name == "N" ? get_int(v, join(pp, name)) : get_double(v, join(pp, name)));
      s.params.emplace_back(name, value);
    }
  } else {
    parse_error(kind_node, join(path, "kind"), "must be atomic, grid or named (got '" + kind + "')");
  }
  try {
    (void)build_measure(s);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(ErrorCode::InvariantViolation, (path.empty() ? "measure" : path) + ": " + e.what());
  }
  return s;
}

MeasureSpec parse_measure(const std::string& text) {
  const auto root = load(text);
  if (root.IsMap()) check_schema(root, "");
  return parse_measure_node(root, "");
}

MeasureSpec measure_from_arg(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return parse_measure(read_file(arg));
  return parse_measure(arg);
}

std::string num(double v) {
  if (std::isnan(v)) return ".nan";
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

YAML::Node num_node(double v) { return YAML::Node(num(v)); }

YAML::Node num_list(const std::vector<double>& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (double d : v) n.push_back(num(d));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

YAML::Node to_yaml(const MeasureSpec& s) {
  YAML::Node n;
  switch (s.kind) {
    case MeasureKind::atomic: {
      n["kind"] = "atomic";
      YAML::Node atoms(YAML::NodeType::Sequence);
      for (const auto& a : s.atoms) {
        YAML::Node e;
        e["w"] = num(a.weight);
        e["a"] = num(a.location);
        e.SetStyle(YAML::EmitterStyle::Flow);
        atoms.push_back(e);
      }
      n["atoms"] = atoms;
      break;
    }
    case MeasureKind::grid: {
      n["kind"] = "grid";
      n["grid"]["x"] = num_list(s.x);
      n["grid"]["f"] = num_list(s.f);
      break;
    }
    case MeasureKind::named: {
      n["kind"] = "named";
      n["family"] = s.family;
      YAML::Node p(YAML::NodeType::Map);
      for (const auto& [k, v] : s.params) {
        if (k == "inverted") p[k] = v != 0.0;
        else if (k == "N") p[k] = static_cast<int>(v);
        else p[k] = num(v);
      }
      p.SetStyle(YAML::EmitterStyle::Flow);
      n["params"] = p;
      break;
    }
  }
  return n;
}

std::string serialize_measure(const MeasureSpec& s) {
  YAML::Node n;
  n["schema_version"] = kSchemaVersion;
  for (const auto& kv : to_yaml(s)) n[kv.first.as<std::string>()] = kv.second;
  return emit(n);
}

std::string emit(const YAML::Node& node) {
  YAML::Emitter out;
  out.SetIndent(2);
  out << node;
  return std::string(out.c_str()) + "\n";
}

// --- scenario configs ---------------------------------------------------------

namespace {

void parse_tolerances(const YAML::Node& n, const std::string& path, Tolerances& tol) {
  require_map(n, path);
  check_keys(n, path,
             {"tol_mass", "tol_quad", "tol_tail", "tol_root", "tol_int", "hysteresis", "tol_pick", "max_quad_panels",
              "max_bracket_expansions", "max_boundary_iterations"});
  auto d = [&](const char* key, double& out) {
    if (const auto v = n[key]) out = get_double(v, join(path, key));
  };
  auto i = [&](const char* key, int& out) {
    if (const auto v = n[key]) out = get_int(v, join(path, key));
  };
  d("tol_mass", tol.tol_mass);
  d("tol_quad", tol.tol_quad);
  d("tol_tail", tol.tol_tail);
  d("tol_root", tol.tol_root);
  d("tol_int", tol.tol_int);
  d("hysteresis", tol.hysteresis);
  d("tol_pick", tol.tol_pick);
  i("max_quad_panels", tol.max_quad_panels);
  i("max_bracket_expansions", tol.max_bracket_expansions);
  i("max_boundary_iterations", tol.max_boundary_iterations);
}

const std::vector<std::string> kRunKeys = {"schema_version", "name", "command", "measure", "times", "grid", "checks",
                                           "tolerances", "outputs", "sweep", "pick", "counterexample", "expect"};

}  // namespace

ScenarioConfig parse_config_node(const YAML::Node& n, const std::string& path) {
  require_map(n, path);
  check_keys(n, path, kRunKeys);
  check_schema(n, path);
  ScenarioConfig c;
  if (const auto v = n["command"]) c.command = get_string(v, join(path, "command"));
  else parse_error(n, join(path, "command"), "missing");
  if (const auto v = n["measure"]) c.measure = parse_measure_node(v, join(path, "measure"));
  if (const auto v = n["times"]) c.times = get_doubles(v, join(path, "times"));
  if (const auto g = n["grid"]) {
    const auto gp = join(path, "grid");
    require_map(g, gp);
    check_keys(g, gp, {"points", "window"});
    if (const auto v = g["points"]) c.grid.points = get_int(v, gp + ".points");
    if (const auto v = g["window"]; v && !v.IsNull()) c.grid.window = get_interval(v, gp + ".window");
  }
  if (const auto v = n["checks"]) c.checks = get_strings(v, join(path, "checks"));
  if (const auto v = n["tolerances"]) parse_tolerances(v, join(path, "tolerances"), c.tol);
  if (const auto o = n["outputs"]) {
    const auto op = join(path, "outputs");
    require_map(o, op);
    check_keys(o, op, {"dir", "csv_path", "report_path"});
    if (const auto v = o["dir"]) c.outputs.dir = get_string(v, op + ".dir");
    if (const auto v = o["csv_path"]) c.outputs.csv_path = get_string(v, op + ".csv_path");
    if (const auto v = o["report_path"]) c.outputs.report_path = get_string(v, op + ".report_path");
  }
  if (const auto s = n["sweep"]) {
    const auto sp = join(path, "sweep");
    require_map(s, sp);
    check_keys(s, sp, {"alpha", "beta", "R", "grid"});
    if (const auto v = s["alpha"]; v && !v.IsNull()) c.sweep.alpha = get_double(v, sp + ".alpha");
    if (const auto v = s["beta"]; v && !v.IsNull()) c.sweep.beta = get_double(v, sp + ".beta");
    if (const auto v = s["R"]) c.sweep.R = get_doubles(v, sp + ".R");
    if (const auto v = s["grid"]) c.sweep.grid = get_int(v, sp + ".grid");
  }
  if (const auto p = n["pick"]) {
    const auto pp = join(path, "pick");
    require_map(p, pp);
    check_keys(p, pp, {"c", "grid"});
    if (const auto v = p["c"]) c.pick.c = get_doubles(v, pp + ".c");
    if (const auto g = p["grid"]) {
      const auto gp = pp + ".grid";
      require_map(g, gp);
      check_keys(g, gp, {"re", "im", "re_count", "im_count", "im_log"});
      auto& G = c.pick.grid;
      if (const auto v = g["re"]) std::tie(G.re_lo, G.re_hi) = std::pair{get_interval(v, gp + ".re").lo, get_interval(v, gp + ".re").hi};
      if (const auto v = g["im"]) std::tie(G.im_lo, G.im_hi) = std::pair{get_interval(v, gp + ".im").lo, get_interval(v, gp + ".im").hi};
      if (const auto v = g["re_count"]) G.re_count = get_int(v, gp + ".re_count");
      if (const auto v = g["im_count"]) G.im_count = get_int(v, gp + ".im_count");
      if (const auto v = g["im_log"]) G.im_log = get_bool(v, gp + ".im_log");
    }
  }
  if (const auto e = n["counterexample"]) {
    const auto ep = join(path, "counterexample");
    require_map(e, ep);
    check_keys(e, ep, {"N", "inverted"});
    if (const auto v = e["N"]) c.counterexample.N = get_int(v, ep + ".N");
    if (const auto v = e["inverted"]) c.counterexample.inverted = get_bool(v, ep + ".inverted");
  }
  if (const auto v = n["expect"]) c.expect = get_string(v, join(path, "expect"));
  try {
    validate(c);
  } catch (const Error& e) {
    if (path.empty()) throw;
    fail(e.code(), path + ": " + e.what());
  }
  return c;
}

void validate(const ScenarioConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    invariant("command", "unknown command '" + c.command + "'");
  }
  const bool needs_times = c.command == "density" || c.command == "sweep" || c.command == "counterexample";
  if (needs_times && c.times.empty()) invariant("times", "at least one t is required");
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    if (!(c.times[i] > 0.0) || !std::isfinite(c.times[i])) {
      invariant("times[" + std::to_string(i) + "]", "t must be positive and finite");
    }
  }
  if (c.command != "counterexample" && !c.measure) invariant("measure", "a measure is required for " + c.command);
  if (c.grid.points < 64) invariant("grid.points", "must be >= 64");
  if (c.grid.window && !(c.grid.window->lo > 0.0 && c.grid.window->hi > c.grid.window->lo &&
                         std::isfinite(c.grid.window->hi))) {
    invariant("grid.window", "need 0 < lo < hi < inf");
  }
  for (std::size_t i = 0; i < c.checks.size(); ++i) {
    if (std::find(kChecks.begin(), kChecks.end(), c.checks[i]) == kChecks.end()) {
      invariant("checks[" + std::to_string(i) + "]", "unknown check '" + c.checks[i] + "'");
    }
  }
  const auto& t = c.tol;
  for (const auto& [name, v] : std::vector<std::pair<const char*, double>>{{"tol_mass", t.tol_mass},
                                                                          {"tol_quad", t.tol_quad},
                                                                          {"tol_tail", t.tol_tail},
                                                                          {"tol_root", t.tol_root},
                                                                          {"tol_int", t.tol_int},
                                                                          {"hysteresis", t.hysteresis},
                                                                          {"tol_pick", t.tol_pick}}) {
    if (!(v > 0.0) || !std::isfinite(v)) invariant(std::string("tolerances.") + name, "must be positive");
  }
  if (!(t.hysteresis < 0.1)) invariant("tolerances.hysteresis", "must be < 0.1");
  if (t.max_quad_panels < 1 || t.max_bracket_expansions < 1 || t.max_boundary_iterations < 1) {
    invariant("tolerances", "iteration limits must be positive");
  }
  if (c.sweep.grid < 16) invariant("sweep.grid", "must be >= 16");
  for (double R : c.sweep.R) {
    if (!(R > 0.0 && R < M_PI)) invariant("sweep.R", "values must lie in (0, pi)");
  }
  for (double v : c.pick.c) {
    if (!(v > 0.0) || !std::isfinite(v)) invariant("pick.c", "values must be positive");
  }
  try {
    c.pick.grid.validate();
  } catch (const Error& e) {
    invariant("pick.grid", e.what());
  }
  if (c.counterexample.N < 3) invariant("counterexample.N", "must be >= 3");
  if (c.expect && *c.expect != "pass" && *c.expect != "negative" && *c.expect != "inconclusive") {
    invariant("expect", "must be pass, negative or inconclusive");
  }
}

ScenarioConfig parse_config(const std::string& text) { return parse_config_node(load(text), ""); }

Scenario parse_scenario(const std::string& text) {
  const auto root = load(text);
  require_map(root, "");
  Scenario s;
  if (!root["runs"]) {
    s.runs.push_back(parse_config_node(root, ""));
    if (const auto v = root["name"]) s.name = get_string(v, "name");
    return s;
  }
  check_keys(root, "", {"schema_version", "name", "description", "runs"});
  check_schema(root, "");
  if (const auto v = root["name"]) s.name = get_string(v, "name");
  if (const auto v = root["description"]) s.description = get_string(v, "description");
  const auto runs = root["runs"];
  if (!runs.IsSequence() || runs.size() == 0) parse_error(runs, "runs", "expected a non-empty list of runs");
  for (std::size_t i = 0; i < runs.size(); ++i) s.runs.push_back(parse_config_node(runs[i], "runs[" + std::to_string(i) + "]"));
  return s;
}

YAML::Node to_yaml(const Tolerances& t) {
  YAML::Node n;
  n["tol_mass"] = num(t.tol_mass);
  n["tol_quad"] = num(t.tol_quad);
  n["tol_tail"] = num(t.tol_tail);
  n["tol_root"] = num(t.tol_root);
  n["tol_int"] = num(t.tol_int);
  n["hysteresis"] = num(t.hysteresis);
  n["tol_pick"] = num(t.tol_pick);
  n["max_quad_panels"] = t.max_quad_panels;
  n["max_bracket_expansions"] = t.max_bracket_expansions;
  n["max_boundary_iterations"] = t.max_boundary_iterations;
  return n;
}

YAML::Node to_yaml(const ScenarioConfig& c) {
  YAML::Node n;
  n["command"] = c.command;
  if (c.measure) n["measure"] = to_yaml(*c.measure);
  n["times"] = num_list(c.times);
  n["grid"]["points"] = c.grid.points;
  if (c.grid.window) n["grid"]["window"] = num_list({c.grid.window->lo, c.grid.window->hi});
  YAML::Node checks(YAML::NodeType::Sequence);
  for (const auto& k : c.checks) checks.push_back(k);
  checks.SetStyle(YAML::EmitterStyle::Flow);
  n["checks"] = checks;
  n["tolerances"] = to_yaml(c.tol);
  n["outputs"]["dir"] = c.outputs.dir;
  if (!c.outputs.csv_path.empty()) n["outputs"]["csv_path"] = c.outputs.csv_path;
  if (!c.outputs.report_path.empty()) n["outputs"]["report_path"] = c.outputs.report_path;
  if (c.command == "sweep") {
    if (c.sweep.alpha) n["sweep"]["alpha"] = num(*c.sweep.alpha);
    if (c.sweep.beta) n["sweep"]["beta"] = num(*c.sweep.beta);
    n["sweep"]["R"] = num_list(c.sweep.R);
    n["sweep"]["grid"] = c.sweep.grid;
  }
  if (c.command == "pick") {
    n["pick"]["c"] = num_list(c.pick.c);
    const auto& G = c.pick.grid;
    n["pick"]["grid"]["re"] = num_list({G.re_lo, G.re_hi});
    n["pick"]["grid"]["im"] = num_list({G.im_lo, G.im_hi});
    n["pick"]["grid"]["re_count"] = G.re_count;
    n["pick"]["grid"]["im_count"] = G.im_count;
    n["pick"]["grid"]["im_log"] = G.im_log;
  }
  if (c.command == "counterexample") {
    n["counterexample"]["N"] = c.counterexample.N;
    n["counterexample"]["inverted"] = c.counterexample.inverted;
  }
  if (c.expect) n["expect"] = *c.expect;
  return n;
}

// --- files --------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::IoError, "cannot rename into '" + path + "'");
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  write_text_atomic(path, out);
}

void write_curve_csv(const DensityCurve& curve, const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(curve.x.size());
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    rows.push_back({num(curve.x[i]), num(curve.q[i]), num(curve.x[i] * curve.q[i])});
  }
  write_csv(path, {"x", "q", "xq"}, rows);
}

std::pair<std::vector<double>, std::vector<double>> read_curve_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "x,q,xq") fail(ErrorCode::ParseError, path + ": expected header x,q,xq");
  std::vector<double> x, q;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double a = 0.0, b = 0.0, c = 0.0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3) {
      fail(ErrorCode::ParseError, path + ": line " + std::to_string(lineno) + ": expected three numbers");
    }
    x.push_back(a);
    q.push_back(b);
  }
  return {std::move(x), std::move(q)};
}

void write_report(const YAML::Node& report, const std::string& path) { write_text_atomic(path, emit(report)); }

}  // namespace freemult
