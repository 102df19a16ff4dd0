#include "freemult/zhong.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freemult/errors.hpp"
#include "freemult/roots.hpp"

namespace freemult {

namespace {

using std::numbers::pi;

constexpr double kThetaLo = 1e-14;
constexpr double kThetaHi = pi - 1e-14;
constexpr int kFallbackScan = 1024;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double identity_h(double s, double) { return s; }
double lambda_h(double s, double sm1) { return sm1 * (s + 1.0); }

struct LambdaEval {
  double log_lambda;
  double theta;
};

LambdaEval lambda_eval(const ZhongContext& ctx, double r,
                       std::optional<std::pair<double, double>> guess = std::nullopt) {
  const double u = solve_angle(ctx, r, guess).theta;
  const double integral = poisson_integral(ctx.nu, r, u, lambda_h, ctx.tol);
  if (!std::isfinite(integral)) {
    fail(ErrorCode::NonIntegrable, "Lambda integral diverged at r = " + fmt(r) + " (u = " + fmt(u) + ")");
  }
  return {std::log(r) + 0.5 * ctx.t * integral, u};
}

// Clustered node placement on [0, 1]: dense near "hard" ends.
double cluster(double u, bool hard_lo, bool hard_hi) {
  if (hard_lo && hard_hi) return 0.5 * (1.0 - std::cos(pi * u));
  if (hard_lo) return 1.0 - std::cos(0.5 * pi * u);
  if (hard_hi) return std::sin(0.5 * pi * u);
  return u;
}

enum class GapShape { increasing, decreasing, convex };

struct Span {
  double lo;
  double hi;
};

}  // namespace

ZhongContext::ZhongContext(Measure nu_, double t_, Tolerances tol_) : nu(std::move(nu_)), t(t_), tol(tol_) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::DomainError, "t must be a positive finite number");
  if (!(tol.tol_root > 0.0) || !(tol.tol_quad > 0.0) || !(tol.tol_tail > 0.0)) {
    fail(ErrorCode::DomainError, "tolerances must be positive");
  }
}

double theta_equation_lhs(const ZhongContext& ctx, double r, double theta) {
  if (!(r > 0.0)) fail(ErrorCode::DomainError, "theta_equation_lhs needs r > 0");
  if (!(theta > 0.0 && theta < pi)) fail(ErrorCode::DomainError, "theta_equation_lhs needs theta in (0, pi)");
  return std::sin(theta) / theta * poisson_integral(ctx.nu, r, theta, identity_h, ctx.tol);
}

AngleSolution solve_angle(const ZhongContext& ctx, double r, std::optional<std::pair<double, double>> guess) {
  const double level = 1.0 / ctx.t;
  AngleSolution out;
  out.f = f_blowup(ctx.nu, r, ctx.tol);
  if (!(out.f > level)) return out;

  auto g = [&](double theta) { return theta_equation_lhs(ctx, r, theta) - level; };
  double lo = kThetaLo, hi = kThetaHi;
  double g_lo = 0.0, g_hi = 0.0;
  bool bracketed = false;
  if (guess) {
    lo = std::max(guess->first, kThetaLo);
    hi = std::min(guess->second, kThetaHi);
    g_lo = g(lo);
    g_hi = g(hi);
    for (int k = 0; k < 4 && !(g_lo > 0.0 && g_hi < 0.0); ++k) {
      if (!(g_lo > 0.0)) hi = lo, g_hi = g_lo, lo = std::max(0.25 * lo, kThetaLo), g_lo = g(lo);
      if (!(g_hi < 0.0)) lo = hi, g_lo = g_hi, hi = std::min(hi + 0.5 * (kThetaHi - hi) + 0.1, kThetaHi), g_hi = g(hi);
    }
    bracketed = g_lo > 0.0 && g_hi < 0.0;
  }
  if (!bracketed) lo = kThetaLo, hi = kThetaHi, g_lo = g(lo), g_hi = g(hi);
  if (!(g_lo > 0.0 && g_hi < 0.0)) {
    // Monotonicity failed numerically: locate the first sign change.
    bool found = false;
    double prev = lo, g_prev = g_lo;
    for (int k = 1; k <= kFallbackScan && !found; ++k) {
      const double th = kThetaLo + (kThetaHi - kThetaLo) * k / kFallbackScan;
      const double gv = g(th);
      if ((g_prev > 0.0) != (gv > 0.0)) {
        lo = prev, hi = th, g_lo = g_prev, g_hi = gv;
        found = true;
      }
      prev = th, g_prev = gv;
    }
    if (!found) {
      fail(ErrorCode::BracketFailure, "no sign change of Phi_r - 1/t on (0, pi) at r = " + fmt(r) +
                                          " although f(r) = " + fmt(out.f) + " > 1/t");
    }
  }
  const auto sol = roots::solve(g, lo, hi, g_lo, g_hi, ctx.tol.tol_root * level);
  out.theta = sol.x;
  out.residual = sol.residual;
  out.evaluations = sol.evaluations + 2;
  return out;
}

double u_t(const ZhongContext& ctx, double r) {
  if (!(r > 0.0)) fail(ErrorCode::DomainError, "u_t needs r > 0");
  return solve_angle(ctx, r).theta;
}

Interval default_window(const ZhongContext& ctx) {
  const Interval s = ctx.nu.support();
  const double margin = std::exp(0.5 * ctx.t + 3.0 * std::sqrt(ctx.t) + 1.0);
  const double lo = std::isfinite(s.hi) ? 1e-4 / s.hi : 1.0 / (ctx.nu.quantile(1.0 - 1e-7) * margin);
  const double hi = s.lo > 0.0 ? 1e4 / s.lo : margin / ctx.nu.quantile(1e-7);
  return {lo, hi};
}

VSet v_set(const ZhongContext& ctx, std::optional<Interval> window) {
  const Interval w = window ? *window : default_window(ctx);
  if (!(w.lo > 0.0) || !(w.hi > w.lo) || !std::isfinite(w.hi)) {
    fail(ErrorCode::DomainError, "r-window must satisfy 0 < lo < hi < inf");
  }
  const double level = 1.0 / ctx.t;
  auto above = [&](double r) { return f_blowup(ctx.nu, r, ctx.tol) > level; };
  const int iters = ctx.tol.max_boundary_iterations;
  // Boundary between an "above" end and a "below" end, reported on the
  // below side so that u_t vanishes there.
  auto boundary = [&](double a, double b) {
    const auto [x, y] = roots::bisect_boundary(above, std::min(a, b), std::max(a, b), iters);
    return above(x) ? y : x;
  };

  // Singular pieces of f in r, ascending: poles 1/a and reciprocal runs.
  std::vector<Span> pieces;
  if (!ctx.nu.has_density()) {
    const auto atoms = ctx.nu.atoms();
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) pieces.push_back({1.0 / it->location, 1.0 / it->location});
  } else {
    const auto runs = ctx.nu.positive_runs();
    for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
      pieces.push_back({std::isfinite(it->hi) ? 1.0 / it->hi : 0.0, it->lo > 0.0 ? 1.0 / it->lo : kInf});
    }
  }

  std::vector<Span> cand;
  auto gap = [&](double a, double b, GapShape shape) {
    if (!(b > a)) return;
    switch (shape) {
      case GapShape::increasing:
        if (above(b)) cand.push_back({above(a) ? a : boundary(b, a), b});
        break;
      case GapShape::decreasing:
        if (above(a)) cand.push_back({a, above(b) ? b : boundary(a, b)});
        break;
      case GapShape::convex: {
        // f is convex between singular pieces; locate its minimum in log r.
        const auto [rho, fmin] = roots::minimize(
            [&](double v) { return std::min(f_blowup(ctx.nu, std::exp(v), ctx.tol), 1e300); }, std::log(a),
            std::log(b), 40);
        const double rstar = std::exp(rho);
        if (fmin > level) {
          cand.push_back({a, b});
          break;
        }
        if (above(a)) cand.push_back({a, boundary(a, rstar)});
        if (above(b)) cand.push_back({boundary(b, rstar), b});
        break;
      }
    }
  };

  // Walk the window: gaps between consecutive singular pieces (clipped).
  double cursor = w.lo;
  bool left_singular = false;  // a singular piece lies left of cursor
  for (const auto& p : pieces) {
    if (p.hi < w.lo) {
      left_singular = true;
      continue;
    }
    if (p.lo > w.hi) break;
    const double plo = std::max(p.lo, w.lo);
    const double phi = std::min(p.hi, w.hi);
    if (plo > cursor) gap(cursor, plo, left_singular ? GapShape::convex : GapShape::increasing);
    cand.push_back({plo, phi});
    cursor = std::max(cursor, phi);
    left_singular = true;
  }
  if (cursor < w.hi) {
    const bool right_singular = std::any_of(pieces.begin(), pieces.end(), [&](const Span& p) { return p.lo > w.hi; });
    if (left_singular && right_singular) gap(cursor, w.hi, GapShape::convex);
    else if (left_singular) gap(cursor, w.hi, GapShape::decreasing);
    else gap(cursor, w.hi, GapShape::increasing);
  }

  std::sort(cand.begin(), cand.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
  VSet out;
  out.window = w;
  std::vector<Span> merged;
  for (const auto& c : cand) {
    if (!merged.empty() && c.lo <= merged.back().hi) merged.back().hi = std::max(merged.back().hi, c.hi);
    else merged.push_back(c);
  }
  for (const auto& m : merged) {
    if (!(m.hi > m.lo)) continue;
    out.intervals.push_back({m.lo, m.hi, m.lo <= w.lo, m.hi >= w.hi});
  }
  if (out.intervals.empty()) {
    fail(ErrorCode::EmptyVSet, "f(r) <= 1/t on the whole window [" + fmt(w.lo) + ", " + fmt(w.hi) + "]");
  }
  return out;
}

double lambda_map(const ZhongContext& ctx, double r) {
  if (!(r > 0.0)) fail(ErrorCode::DomainError, "lambda_map needs r > 0");
  return std::exp(lambda_eval(ctx, r).log_lambda);
}

double lambda_inverse(const ZhongContext& ctx, double y) {
  if (!(y > 0.0) || !std::isfinite(y)) fail(ErrorCode::DomainError, "lambda_inverse needs y > 0");
  const double ly = std::log(y);
  auto g = [&](double rho) { return lambda_eval(ctx, std::exp(rho)).log_lambda - ly; };
  const double step = std::log(2.0);
  double a = ly, ga = g(a);
  if (ga == 0.0) return y;
  double b = a, gb = ga;
  int k = 0;
  for (; k < ctx.tol.max_bracket_expansions && (gb < 0.0) == (ga < 0.0); ++k) {
    a = b, ga = gb;
    b = (ga < 0.0) ? b + step : b - step;
    gb = g(b);
  }
  if ((gb < 0.0) == (ga < 0.0)) {
    fail(ErrorCode::BracketFailure, "Lambda^{-1}(" + fmt(y) + "): no bracket after " + std::to_string(k) +
                                        " doublings (Lambda not monotone?)");
  }
  if (a > b) std::swap(a, b), std::swap(ga, gb);
  const auto sol = roots::solve(g, a, b, ga, gb, 0.5 * ctx.tol.tol_root);
  return std::exp(sol.x);
}

double density(const ZhongContext& ctx, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorCode::DomainError, "density needs x > 0");
  const double r = lambda_inverse(ctx, 1.0 / x);
  const double u = u_t(ctx, r);
  if (u == 0.0) return 0.0;
  return u / (pi * ctx.t * x);
}

SupportSet support_set(const ZhongContext& ctx, const VSet& v) {
  SupportSet s;
  for (auto it = v.intervals.rbegin(); it != v.intervals.rend(); ++it) {
    s.intervals.push_back({1.0 / lambda_map(ctx, it->hi), 1.0 / lambda_map(ctx, it->lo)});
  }
  return s;
}

double DensityCurve::integral() const {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (q[i] + q[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

double DensityCurve::mean() const {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] * q[i] + x[i - 1] * q[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

namespace {

std::optional<std::pair<double, double>> angle_guess(double a, double b) {
  if (!(a > 0.0) && !(b > 0.0)) return std::nullopt;
  return std::pair{0.8 * std::min(a, b), std::min(1.25 * std::max(a, b), kThetaHi)};
}

// Lambda tabulated over one V component; inverts within table brackets.
struct Component {
  VInterval v;
  std::vector<double> rho;   // log r
  std::vector<double> logl;  // log Lambda
  std::vector<double> theta; // u_t at the nodes
  bool monotone = true;
  double xlo = 0.0, xhi = 0.0;
  bool soft_lo = false, soft_hi = false;  // in x
};

Component tabulate(const ZhongContext& ctx, const VInterval& v, int nodes) {
  Component c;
  c.v = v;
  const double a = std::log(v.lo), b = std::log(v.hi);
  c.rho.resize(static_cast<std::size_t>(nodes));
  c.logl.resize(c.rho.size());
  c.theta.resize(c.rho.size());
  for (int k = 0; k < nodes; ++k) {
    const double u = static_cast<double>(k) / (nodes - 1);
    c.rho[static_cast<std::size_t>(k)] = (k == nodes - 1) ? b : a + (b - a) * cluster(u, !v.lo_clipped, !v.hi_clipped);
  }
  for (std::size_t k = 0; k < c.rho.size(); ++k) {
    const auto e = lambda_eval(ctx, std::exp(c.rho[k]), k > 0 ? angle_guess(c.theta[k - 1], c.theta[k - 1]) : std::nullopt);
    c.logl[k] = e.log_lambda;
    c.theta[k] = e.theta;
    if (k > 0 && !(c.logl[k] > c.logl[k - 1])) c.monotone = false;
  }
  c.xlo = std::exp(-c.logl.back());
  c.xhi = std::exp(-c.logl.front());
  c.soft_lo = v.hi_clipped;
  c.soft_hi = v.lo_clipped;
  return c;
}

// q at x inside the component's image.
double curve_value(const ZhongContext& ctx, const Component& c, double x) {
  const double target = -std::log(x);
  std::size_t j = 0;
  if (c.monotone) {
    auto it = std::upper_bound(c.logl.begin(), c.logl.end(), target);
    j = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - c.logl.begin() - 1, 0,
                                                            static_cast<std::ptrdiff_t>(c.logl.size()) - 2));
  } else {
    for (j = 0; j + 2 < c.logl.size(); ++j) {
      if ((c.logl[j] - target) * (c.logl[j + 1] - target) <= 0.0) break;
    }
  }
  double theta_best = 0.0, best = kInf;
  const auto guess = angle_guess(c.theta[j], c.theta[j + 1]);
  auto g = [&](double rho) {
    const auto e = lambda_eval(ctx, std::exp(rho), guess);
    const double v = e.log_lambda - target;
    if (std::abs(v) < best) best = std::abs(v), theta_best = e.theta;
    return v;
  };
  const double ga = c.logl[j] - target, gb = c.logl[j + 1] - target;
  if (ga == 0.0) return c.theta[j] / (pi * ctx.t * x);
  if (gb == 0.0) return c.theta[j + 1] / (pi * ctx.t * x);
  if ((ga < 0.0) == (gb < 0.0)) {
    // Outside the tabulated image (rounding at the ends): nearest node.
    const std::size_t k = std::abs(ga) < std::abs(gb) ? j : j + 1;
    return c.theta[k] / (pi * ctx.t * x);
  }
  (void)roots::solve(g, c.rho[j], c.rho[j + 1], ga, gb, 0.5 * ctx.tol.tol_root);
  if (best == kInf) {
    // A node already met the residual tolerance; the solver never evaluated.
    theta_best = std::abs(ga) < std::abs(gb) ? c.theta[j] : c.theta[j + 1];
  }
  return theta_best / (pi * ctx.t * x);
}

}  // namespace

DensityCurve density_curve(const ZhongContext& ctx, const CurveSpec& spec) {
  if (spec.points < 64) fail(ErrorCode::DomainError, "density curves need at least 64 points");
  DensityCurve curve;
  curve.meta.t = ctx.t;
  curve.meta.measure = ctx.nu.describe();
  curve.meta.points = spec.points;
  curve.meta.tol = ctx.tol;

  VSet v;
  try {
    v = v_set(ctx, spec.window);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyVSet) throw;
    curve.meta.window = spec.window ? *spec.window : default_window(ctx);
    curve.meta.warnings.emplace_back(e.what());
    return curve;
  }
  curve.meta.window = v.window;

  const int table_nodes = std::clamp(spec.points / 8, 33, 257);
  std::vector<Component> comps;
  for (auto it = v.intervals.rbegin(); it != v.intervals.rend(); ++it) comps.push_back(tabulate(ctx, *it, table_nodes));
  for (const auto& c : comps) {
    if (!c.monotone) {
      curve.meta.lambda_monotone = false;
      curve.meta.warnings.push_back("Lambda not increasing on V component (" + fmt(c.v.lo) + ", " + fmt(c.v.hi) +
                                    "); inversion by scan");
    }
  }

  // Group components whose images touch within grid resolution.
  const double span = std::log(comps.back().xhi / comps.front().xlo);
  const double resolution = span / spec.points;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    if (!groups.empty() && std::log(comps[k].xlo / comps[groups.back().back()].xhi) <= resolution) {
      curve.meta.merges.push_back("support components [" + fmt(comps[groups.back().back()].xlo) + ", " +
                                  fmt(comps[groups.back().back()].xhi) + "] and [" + fmt(comps[k].xlo) + ", " +
                                  fmt(comps[k].xhi) + "] merged (gap below grid resolution)");
      groups.back().push_back(k);
    } else {
      groups.push_back({k});
    }
  }

  double total_len = 0.0;
  for (const auto& g : groups) total_len += std::log(comps[g.back()].xhi / comps[g.front()].xlo);

  for (const auto& g : groups) {
    const Component& first = comps[g.front()];
    const Component& last = comps[g.back()];
    const Interval range{first.xlo, last.xhi};
    curve.support.intervals.push_back(range);
    curve.soft_ends.emplace_back(first.soft_lo, last.soft_hi);
    const double len = std::log(range.hi / range.lo);
    const int n = std::max(64, static_cast<int>(std::lround(spec.points * len / total_len)));
    const double a = std::log(range.lo), b = std::log(range.hi);
    for (int k = 0; k < n; ++k) {
      const double u = static_cast<double>(k) / (n - 1);
      const double x = k == 0 ? range.lo : k == n - 1 ? range.hi : std::exp(a + (b - a) * cluster(u, !first.soft_lo, !last.soft_hi));
      double q = 0.0;
      const bool hard_end = (k == 0 && !first.soft_lo) || (k == n - 1 && !last.soft_hi);
      if (!hard_end) {
        for (std::size_t idx : g) {
          if (x >= comps[idx].xlo && x <= comps[idx].xhi) {
            q = curve_value(ctx, comps[idx], x);
            break;
          }
        }
      }
      if (!curve.x.empty() && !(x > curve.x.back())) continue;
      curve.x.push_back(x);
      curve.q.push_back(q);
    }
  }
  return curve;
}

}  // namespace freemult
