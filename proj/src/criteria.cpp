#include "freemult/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "freemult/errors.hpp"
#include "freemult/roots.hpp"
#include "freemult/zhong.hpp"
#include "parallel.hpp"

namespace freemult {

using std::numbers::pi;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double s_numerator(double s, double /*sm1*/) { return s; }

}  // namespace

double theta_R(const Measure& nu, double R, double r, const Tolerances& tol) {
  if (!(R > 0.0 && R < pi)) fail(ErrorCode::DomainError, "R must lie in (0, pi)");
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::DomainError, "r must be positive");
  return std::sin(R) / R * poisson_integral(nu, r, R, s_numerator, tol);
}

SolutionCount count_solutions(const std::function<double(double)>& F, double level, Interval window, int grid,
                              const Tolerances& tol) {
  if (!(window.lo > 0.0) || !(window.hi > window.lo) || !std::isfinite(window.hi)) {
    fail(ErrorCode::DomainError, "r-window must satisfy 0 < lo < hi < inf");
  }
  if (grid < 16) fail(ErrorCode::DomainError, "solution grid needs at least 16 points");
  const double y0 = std::log(window.lo);
  const double y1 = std::log(window.hi);
  auto g = [&](double y) { return F(std::exp(y)) - level; };
  std::vector<double> y(static_cast<std::size_t>(grid));
  std::vector<double> v(y.size());
  for (int i = 0; i < grid; ++i) {
    y[i] = (i == grid - 1) ? y1 : y0 + (y1 - y0) * i / (grid - 1);
    v[i] = g(y[i]);
  }
  if (v.front() >= 0.0 || v.back() >= 0.0) {
    fail(ErrorCode::WindowTooNarrow, "equation is not below its level at the window ends [" + fmt(window.lo) + ", " +
                                         fmt(window.hi) + "]");
  }
  const double tang = tol.tol_root * std::abs(level);
  const double res_tol = 0.5 * tang;

  struct Root {
    double y;
    bool tangent;
  };
  std::vector<Root> roots_found;
  auto polish = [&](double a, double b, double ga, double gb) {
    const auto r = roots::solve(g, a, b, ga, gb, res_tol);
    roots_found.push_back({r.x, false});
  };
  for (std::size_t i = 0; i + 1 < y.size(); ++i) {
    if ((v[i] < 0.0) != (v[i + 1] < 0.0)) polish(y[i], y[i + 1], v[i], v[i + 1]);
  }
  // Pairs of roots (or a double root) hidden between grid points.
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const bool peak = v[i] < 0.0 && v[i - 1] < 0.0 && v[i + 1] < 0.0 && v[i] >= v[i - 1] && v[i] > v[i + 1];
    const bool dip = v[i] >= 0.0 && v[i - 1] >= 0.0 && v[i + 1] >= 0.0 && v[i] <= v[i - 1] && v[i] < v[i + 1];
    if (!peak && !dip) continue;
    const double sgn = peak ? -1.0 : 1.0;
    const auto [ym, fm] = roots::minimize([&](double s) { return sgn * g(s); }, y[i - 1], y[i + 1]);
    const double gm = sgn * fm;
    if (std::abs(gm) <= tang) {
      roots_found.push_back({ym, true});
    } else if ((peak && gm > 0.0) || (dip && gm < 0.0)) {
      polish(y[i - 1], ym, v[i - 1], gm);
      polish(ym, y[i + 1], gm, v[i + 1]);
    }
  }
  std::sort(roots_found.begin(), roots_found.end(), [](const Root& a, const Root& b) { return a.y < b.y; });

  SolutionCount out;
  const double merge = std::max(1e3 * tol.tol_root, 1e-9);
  for (std::size_t k = 0; k < roots_found.size();) {
    std::size_t j = k + 1;
    bool tangent = roots_found[k].tangent;
    while (j < roots_found.size() && roots_found[j].y - roots_found[k].y <= merge) {
      tangent = true;
      ++j;
    }
    double ysum = 0.0;
    for (std::size_t m = k; m < j; ++m) ysum += roots_found[m].y;
    out.locations.push_back(std::exp(ysum / static_cast<double>(j - k)));
    out.tangency.push_back(tangent);
    out.count += 1;
    out.count_with_multiplicity += tangent ? 2 : 1;
    out.boundary = out.boundary || tangent;
    k = j;
  }
  return out;
}

Interval theta_window(const Measure& nu, double t) { return default_window(ZhongContext(nu, t)); }

SolutionCount count_theta_solutions(const Measure& nu, double R, double t, std::optional<Interval> window, int grid,
                                    const Tolerances& tol) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::DomainError, "t must be positive");
  if (!(R > 0.0 && R < pi)) fail(ErrorCode::DomainError, "R must lie in (0, pi)");
  const Interval w = window ? *window : theta_window(nu, t);
  return count_solutions([&](double r) { return theta_R(nu, R, r, tol); }, 1.0 / t, w, grid, tol);
}

std::vector<double> default_R_sweep(int count) {
  if (count < 2) fail(ErrorCode::DomainError, "R sweep needs at least two values");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lo = 0.01;
  const double hi = pi - 0.01;
  for (int k = 0; k < count; ++k) {
    const double u = static_cast<double>(k) / (count - 1);
    out[k] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(pi * u));
  }
  return out;
}

CriterionReport theta_sweep(const Measure& nu, double t, const std::vector<double>& R, std::optional<Interval> window,
                            int grid, const Tolerances& tol) {
  CriterionReport rep;
  rep.t = t;
  rep.R = R;
  const Interval w = window ? *window : theta_window(nu, t);
  rep.counts = detail::parallel_map<SolutionCount>(
      R.size(), [&](std::size_t k) { return count_theta_solutions(nu, R[k], t, w, grid, tol); });
  for (const auto& c : rep.counts) rep.max_count = std::max(rep.max_count, c.count_with_multiplicity);
  rep.verdict = rep.max_count <= 2;
  return rep;
}

double d_bound(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta >= alpha) || !std::isfinite(beta)) {
    fail(ErrorCode::HypothesisViolated, "d_bound needs 0 < alpha <= beta");
  }
  const double a4 = std::pow(alpha, 4);
  const double b4 = std::pow(beta, 4);
  if (!(b4 - 3.0 * a4 < 2.0 * std::pow(alpha, 3) * beta)) {
    fail(ErrorCode::HypothesisViolated, "beta^4 - 3 alpha^4 >= 2 alpha^3 beta for alpha = " + fmt(alpha) +
                                            ", beta = " + fmt(beta));
  }
  const double c = 3.0 * a4 - b4;
  const double rad = 4.0 * std::pow(alpha, 6) * beta * beta - c * c;
  if (!(rad > 0.0)) return std::numeric_limits<double>::infinity();
  return 2.0 * beta * beta * (alpha + beta) * (alpha + beta) * pi / std::sqrt(rad);
}

GapCheck case2_gap_check(const Measure& nu, double alpha, double beta, double t, int samples, const Tolerances& tol) {
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "t must be positive");
  if (samples < 2) fail(ErrorCode::DomainError, "at least two samples per axis");
  (void)d_bound(alpha, beta);
  GapCheck out;
  out.cos_threshold = (3.0 * std::pow(alpha, 4) - std::pow(beta, 4)) / (2.0 * std::pow(alpha, 3) * beta);
  out.min_margin = std::numeric_limits<double>::infinity();
  if (out.cos_threshold >= 1.0) return out;
  const double R_max = out.cos_threshold <= -1.0 ? pi : std::acos(out.cos_threshold);
  for (int i = 0; i < samples; ++i) {
    const double R = R_max * (i + 0.5) / samples;
    for (int j = 0; j < samples; ++j) {
      const double r = 1.0 / beta + (1.0 / alpha - 1.0 / beta) * j / (samples - 1);
      const double m = theta_R(nu, R, r, tol) - 1.0 / t;
      out.min_margin = std::min(out.min_margin, m);
      ++out.samples;
      if (!(m > 0.0)) out.holds = false;
    }
  }
  return out;
}

namespace {

// e^y f(e^y), 0 off the log domain; integrable endpoint singularities are
// evaluated slightly inside.
double log_pushforward(const Measure& nu, double y) {
  const Interval d = nu.log_domain();
  if (y < d.lo || y > d.hi) return 0.0;
  double p = std::exp(y) * nu.density(std::exp(y));
  if (std::isfinite(p)) return p;
  const double step = 1e-9 * std::max(1.0, std::abs(y));
  for (double yy : {y + step, y - step}) {
    if (yy < d.lo || yy > d.hi) continue;
    p = std::exp(yy) * nu.density(std::exp(yy));
    if (std::isfinite(p)) return p;
  }
  return 0.0;
}

struct Cell {
  double s;  // log location
  double m;  // mass
};

std::vector<Cell> discretize(const Measure& nu, int cells) {
  std::vector<Cell> out;
  if (!nu.has_density()) {
    for (const auto& a : nu.atoms()) out.push_back({std::log(a.location), a.weight});
    return out;
  }
  const Interval d = nu.log_domain();
  double prev = nu.cdf(std::exp(d.lo));
  for (int j = 0; j < cells; ++j) {
    const double a = d.lo + (d.hi - d.lo) * j / cells;
    const double b = (j == cells - 1) ? d.hi : d.lo + (d.hi - d.lo) * (j + 1) / cells;
    const double c = nu.cdf(std::exp(b));
    if (c > prev) out.push_back({0.5 * (a + b), c - prev});
    prev = std::max(prev, c);
  }
  return out;
}

}  // namespace

Measure mult_convolve(const Measure& mu, const Measure& nu, const ConvolutionSpec& spec) {
  if (spec.points < 64) fail(ErrorCode::DomainError, "convolution grid needs at least 64 points");
  if (!mu.has_density() && !nu.has_density()) {
    std::vector<Atom> prod;
    for (const auto& a : mu.atoms()) {
      for (const auto& b : nu.atoms()) prod.push_back({a.weight * b.weight, a.location * b.location});
    }
    std::sort(prod.begin(), prod.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    std::vector<Atom> merged;
    for (const auto& p : prod) {
      if (!merged.empty() && p.location <= merged.back().location * (1.0 + 1e-14)) {
        merged.back().weight += p.weight;
      } else {
        merged.push_back(p);
      }
    }
    return Measure::atomic(std::move(merged));
  }
  const auto span = [](const Measure& m) { return m.log_domain().hi - m.log_domain().lo; };
  const Measure* disc = &mu;
  const Measure* cont = &nu;
  if (!nu.has_density() || (mu.has_density() && span(nu) < span(mu))) std::swap(disc, cont);

  const auto cells = discretize(*disc, spec.points);
  const Interval cd = cont->log_domain();
  double smin = cells.front().s;
  double smax = cells.front().s;
  for (const auto& c : cells) smin = std::min(smin, c.s), smax = std::max(smax, c.s);
  const double lo = smin + cd.lo;
  const double hi = smax + cd.hi;
  const int n = spec.points;
  const double h = (hi - lo) / (n - 1);
  if (!(h * 8.0 <= cd.hi - cd.lo)) {
    fail(ErrorCode::GridUnderflow, "output log-grid step " + fmt(h) + " cannot resolve a factor of log-width " +
                                       fmt(cd.hi - cd.lo) + "; raise points");
  }
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<double> f(x.size());
  for (int i = 0; i < n; ++i) {
    const double y = (i == n - 1) ? hi : lo + h * i;
    double acc = 0.0;
    for (const auto& c : cells) {
      const double z = y - c.s;
      if (z < cd.lo || z > cd.hi) continue;
      acc += c.m * log_pushforward(*cont, z);
    }
    x[i] = std::exp(y);
    f[i] = acc / x[i];
  }
  double mass = 0.0;
  for (int i = 0; i + 1 < n; ++i) mass += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
  if (!(mass > 0.5) || !std::isfinite(mass)) {
    fail(ErrorCode::GridUnderflow, "convolution grid captured mass " + fmt(mass) + "; supports too separated");
  }
  return Measure::grid_normalized(std::move(x), std::move(f));
}

double lambda_convolution_density(const Measure& nu, double B, double r, const Tolerances& tol) {
  if (!(B > 0.0 && B < pi)) fail(ErrorCode::DomainError, "B must lie in (0, pi)");
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::DomainError, "r must be positive");
  const double cB = std::sin(B) / (pi - B);
  const double cosB = std::cos(B);
  auto kernel = [&](double xi) {
    const double s = r * xi;
    return cB * xi / (1.0 - 2.0 * s * cosB + s * s);
  };
  const KernelFeature peak{cosB > 0.0 ? cosB / r : 1.0 / r, std::sin(B) / r};
  return integrate(nu, kernel, tol, std::span<const KernelFeature>(&peak, 1));
}

double lemma41_condition2_lhs(const Measure& nu, double a, double t, double r, const Tolerances& tol) {
  const double B = a * pi * t;
  if (!(B > 0.0 && B < pi)) fail(ErrorCode::DomainError, "a pi t must lie in (0, pi)");
  const double cB = std::sin(B) / (pi - B);
  return r / cB * lambda_convolution_density(nu, B, r, tol);
}

SolutionCount count_condition2_solutions(const Measure& nu, double a, double t, std::optional<Interval> window,
                                         int grid, const Tolerances& tol) {
  if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::DomainError, "t must be positive");
  const double B = a * pi * t;
  if (!(B > 0.0 && B < pi)) fail(ErrorCode::DomainError, "a pi t must lie in (0, pi)");
  const Interval w = window ? *window : theta_window(nu, t);
  return count_solutions([&](double r) { return lemma41_condition2_lhs(nu, a, t, r, tol); }, a * pi / std::sin(B), w,
                         grid, tol);
}

CounterexampleRules example48_rules() {
  const double c = 945.0 / std::pow(pi, 6);
  return {"example48", [c](int n) { return c / std::pow(static_cast<double>(n), 6); },
          [](int n) { return std::pow(static_cast<double>(n), -4); }};
}

std::pair<Measure, CounterexampleSpec> build_counterexample(int N, const CounterexampleRules& rules, bool inverted) {
  if (N < 3) fail(ErrorCode::DomainError, "counterexample needs N >= 3");
  if (!rules.weight || !rules.location) fail(ErrorCode::DomainError, "counterexample rules are incomplete");
  CounterexampleSpec spec;
  spec.family = rules.name;
  spec.N = N;
  spec.inverted = inverted;
  for (int n = 1; n <= N; ++n) {
    const double w = rules.weight(n);
    const double a = rules.location(n);
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::HypothesisViolated, "weight w_" + std::to_string(n) + " is not positive");
    if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorCode::HypothesisViolated, "location a_" + std::to_string(n) + " is not positive");
    if (!spec.locations.empty() && !(a < spec.locations.back())) {
      fail(ErrorCode::HypothesisViolated, "locations must be strictly decreasing (a_" + std::to_string(n) + ")");
    }
    spec.raw_weights.push_back(w);
    spec.locations.push_back(a);
    spec.raw_mass += w;
    spec.partial_sum_w_over_a += w / a;
  }
  spec.remainder_mass = 1.0 - spec.raw_mass;
  for (double w : spec.raw_weights) spec.weights.push_back(w / spec.raw_mass);
  for (int k = 0; k + 1 < N; ++k) {
    const double a = spec.locations[k];
    const double b = spec.locations[k + 1];
    spec.ratios.push_back(a * b * (a + b) / ((a - b) * (a - b)));
    spec.midpoints.push_back(0.5 * (1.0 / b + 1.0 / a));
    if (k > 0 && !(spec.ratios[k] < spec.ratios[k - 1])) spec.ratios_decreasing = false;
  }
  std::vector<Atom> atoms;
  for (int n = N - 1; n >= 0; --n) atoms.push_back({spec.weights[n], spec.locations[n]});
  Measure m = Measure::atomic(std::move(atoms), 1e-12);
  if (inverted) m = invert_measure(m);
  return {std::move(m), std::move(spec)};
}

GapCertificate gap_certificate(const Measure& nu, double t, int k, const Tolerances& tol) {
  if (nu.has_density()) fail(ErrorCode::DomainError, "gap certificate needs an atomic measure");
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "t must be positive");
  const auto atoms = nu.atoms();
  const int n = static_cast<int>(atoms.size());
  if (k < 1 || k + 1 > n) {
    fail(ErrorCode::IndexOutOfRange, "k = " + std::to_string(k) + " needs atoms a_k, a_{k+1} (have " +
                                         std::to_string(n) + ")");
  }
  // a_1 > a_2 > ... : reverse of the stored ascending order.
  const double ak = atoms[static_cast<std::size_t>(n - k)].location;
  const double ak1 = atoms[static_cast<std::size_t>(n - k - 1)].location;
  GapCertificate out;
  out.k = k;
  out.b_k = 0.5 * (1.0 / ak1 + 1.0 / ak);
  out.f_at_bk = f_blowup(nu, out.b_k, tol);
  out.below = out.f_at_bk < 1.0 / t;
  return out;
}

std::optional<GapCertificate> first_gap_certificate(const Measure& nu, double t, const Tolerances& tol) {
  const int n = static_cast<int>(nu.atoms().size());
  for (int k = 1; k + 1 <= n; ++k) {
    auto c = gap_certificate(nu, t, k, tol);
    if (c.below) return c;
  }
  return std::nullopt;
}

}  // namespace freemult
