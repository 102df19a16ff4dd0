#include "freemult/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "freemult/errors.hpp"
#include "freemult/roots.hpp"

namespace freemult {

namespace {

using std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvariantViolation, what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void validate(const NamedFamily& fam) {
  std::visit(overloaded{
                 [](const family::Dirac& f) { require(finite_positive(f.c), "dirac: c must be > 0"); },
                 [](const family::Lambda& f) {
                   require(std::isfinite(f.b) && f.b > 0.0 && f.b < pi, "lambda: b must lie in (0, pi)");
                 },
                 [](const family::HalfNormal& f) { require(finite_positive(f.t), "half_normal: t must be > 0"); },
                 [](const family::Gamma& f) {
                   require(finite_positive(f.p), "gamma: p must be > 0");
                   require(finite_positive(f.theta), "gamma: theta must be > 0");
                 },
                 [](const family::Beta& f) {
                   require(finite_positive(f.p), "beta: p must be > 0");
                   require(finite_positive(f.q), "beta: q must be > 0");
                 },
                 [](const family::MarchenkoPastur&) {},
                 [](const family::MarchenkoPasturInverse&) {},
                 [](const family::BooleanStable& f) {
                   require(std::isfinite(f.alpha) && f.alpha > 0.0 && f.alpha < 1.0,
                           "boolean_stable: alpha must lie in (0, 1)");
                 },
                 [](const family::UniformInterval& f) {
                   require(finite_positive(f.lo) && std::isfinite(f.hi) && f.lo < f.hi,
                           "uniform: need 0 < alpha < beta");
                 },
                 [](const family::LogNormal& f) {
                   require(std::isfinite(f.m), "log_normal: m must be finite");
                   require(finite_positive(f.s), "log_normal: s must be > 0");
                 },
             },
             fam);
}

// --- closed-form pieces of the named families -------------------------------

double mp_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 4.0) return 1.0;
  return (4.0 * std::asin(std::sqrt(x) / 2.0) + std::sqrt(x * (4.0 - x))) / (2.0 * pi);
}

double mp_sf(double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 4.0) return 0.0;
  return (4.0 * std::acos(std::sqrt(x) / 2.0) - std::sqrt(x * (4.0 - x))) / (2.0 * pi);
}

double named_density(const NamedFamily& fam, double x) {
  if (!(x > 0.0)) return 0.0;
  return std::visit(
      overloaded{
          [](const family::Dirac&) -> double { fail(ErrorCode::AtomicHasNoDensity, "dirac has no density"); },
          [x](const family::Lambda& f) {
            const double cb = std::sin(f.b) / (pi - f.b);
            const double d = x - std::cos(f.b);
            const double s = std::sin(f.b);
            return cb / (d * d + s * s);
          },
          [x](const family::HalfNormal& f) {
            return 2.0 / std::sqrt(2.0 * pi * f.t) * std::exp(-x * x / (2.0 * f.t));
          },
          [x](const family::Gamma& f) {
            return std::exp((f.p - 1.0) * std::log(x) - x / f.theta - f.p * std::log(f.theta) - std::lgamma(f.p));
          },
          [x](const family::Beta& f) {
            if (x >= 1.0) return 0.0;
            const double lb = std::lgamma(f.p) + std::lgamma(f.q) - std::lgamma(f.p + f.q);
            return std::exp((f.p - 1.0) * std::log(x) + (f.q - 1.0) * std::log1p(-x) - lb);
          },
          [x](const family::MarchenkoPastur&) {
            if (x > 4.0) return 0.0;
            return std::sqrt((4.0 - x) / x) / (2.0 * pi);
          },
          [x](const family::MarchenkoPasturInverse&) {
            if (x < 0.25) return 0.0;
            return std::sqrt(4.0 * x - 1.0) / (2.0 * pi * x * x);
          },
          [x](const family::BooleanStable& f) {
            const double c = std::cos(pi * f.alpha);
            const double s = std::sin(pi * f.alpha);
            const double y = std::pow(x, f.alpha);
            return s / pi * (y / x) / ((y + c) * (y + c) + s * s);
          },
          [x](const family::UniformInterval& f) {
            return (x >= f.lo && x <= f.hi) ? 1.0 / (f.hi - f.lo) : 0.0;
          },
          [x](const family::LogNormal& f) {
            const double z = (std::log(x) - f.m) / f.s;
            return std::exp(-0.5 * z * z) / (x * f.s * std::sqrt(2.0 * pi));
          },
      },
      fam);
}

double named_cdf(const NamedFamily& fam, double x, bool upper) {
  const double lower = std::visit(
      overloaded{
          [&](const family::Dirac& f) -> double {
            const bool below = x >= f.c;
            return upper ? (below ? 0.0 : 1.0) : (below ? 1.0 : 0.0);
          },
          [&](const family::Lambda& f) -> double {
            if (x <= 0.0) return upper ? 1.0 : 0.0;
            const double s = std::sin(f.b);
            const double d = x - std::cos(f.b);
            if (upper) return std::atan2(s, d) / (pi - f.b);
            return (std::atan(d / s) + pi / 2.0 - f.b) / (pi - f.b);
          },
          [&](const family::HalfNormal& f) -> double {
            if (x <= 0.0) return upper ? 1.0 : 0.0;
            const double z = x / std::sqrt(2.0 * f.t);
            return upper ? boost::math::erfc(z) : boost::math::erf(z);
          },
          [&](const family::Gamma& f) -> double {
            if (x <= 0.0) return upper ? 1.0 : 0.0;
            return upper ? boost::math::gamma_q(f.p, x / f.theta) : boost::math::gamma_p(f.p, x / f.theta);
          },
          [&](const family::Beta& f) -> double {
            if (x <= 0.0) return upper ? 1.0 : 0.0;
            if (x >= 1.0) return upper ? 0.0 : 1.0;
            return upper ? boost::math::ibetac(f.p, f.q, x) : boost::math::ibeta(f.p, f.q, x);
          },
          [&](const family::MarchenkoPastur&) -> double { return upper ? mp_sf(x) : mp_cdf(x); },
          [&](const family::MarchenkoPasturInverse&) -> double {
            if (x <= 0.25) return upper ? 1.0 : 0.0;
            return upper ? mp_cdf(1.0 / x) : mp_sf(1.0 / x);
          },
          [&](const family::BooleanStable& f) -> double {
            if (x <= 0.0) return upper ? 1.0 : 0.0;
            const double c = std::cos(pi * f.alpha);
            const double s = std::sin(pi * f.alpha);
            const double y = std::pow(x, f.alpha);
            if (upper) return std::atan2(s, y + c) / (pi * f.alpha);
            return (std::atan((y + c) / s) - std::atan(c / s)) / (pi * f.alpha);
          },
          [&](const family::UniformInterval& f) -> double {
            const double v = std::clamp((x - f.lo) / (f.hi - f.lo), 0.0, 1.0);
            return upper ? 1.0 - v : v;
          },
          [&](const family::LogNormal& f) -> double {
            if (x <= 0.0) return upper ? 1.0 : 0.0;
            const double z = (std::log(x) - f.m) / (f.s * std::sqrt(2.0));
            return upper ? 0.5 * boost::math::erfc(z) : 0.5 * boost::math::erfc(-z);
          },
      },
      fam);
  return std::clamp(lower, 0.0, 1.0);
}

Interval named_support(const NamedFamily& fam) {
  return std::visit(overloaded{
                        [](const family::Dirac& f) { return Interval{f.c, f.c}; },
                        [](const family::Beta&) { return Interval{0.0, 1.0}; },
                        [](const family::MarchenkoPastur&) { return Interval{0.0, 4.0}; },
                        [](const family::MarchenkoPasturInverse&) { return Interval{0.25, kInf}; },
                        [](const family::UniformInterval& f) { return Interval{f.lo, f.hi}; },
                        [](const auto&) { return Interval{0.0, kInf}; },
                    },
                    fam);
}

// Cumulative trapezoid of a piecewise-linear density.
std::vector<double> cumulative(std::span<const double> x, std::span<const double> f) {
  std::vector<double> c(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) c[i] = c[i - 1] + 0.5 * (f[i] + f[i - 1]) * (x[i] - x[i - 1]);
  return c;
}

std::size_t cell_of(std::span<const double> x, double v) {
  auto it = std::upper_bound(x.begin(), x.end(), v);
  if (it == x.begin()) return 0;
  return std::min<std::size_t>(static_cast<std::size_t>(it - x.begin()) - 1, x.size() - 2);
}

// Breakpoints in y = log xi for one kernel feature, graded geometrically
// from the feature (or from the nearest domain point) outwards.
void feature_breaks(const KernelFeature& feat, Interval dom, std::vector<double>& out) {
  if (!(feat.center > 0.0) || !std::isfinite(feat.center)) return;
  const double yc = std::log(feat.center);
  const double nearest = std::clamp(yc, dom.lo, dom.hi);
  double scale = std::max({feat.half_width / feat.center, std::abs(yc - nearest), 1e-15 * (1.0 + std::abs(yc))});
  if (dom.interior(yc)) out.push_back(yc);
  const double span = dom.hi - dom.lo;
  for (int k = 0; k < 80 && scale < 2.0 * span; ++k, scale *= 4.0) {
    for (double y : {yc - scale, yc + scale}) {
      if (dom.interior(y)) out.push_back(y);
    }
  }
}

std::vector<double> finalize_breaks(std::vector<double> b, Interval dom) {
  b.push_back(dom.lo);
  b.push_back(dom.hi);
  std::sort(b.begin(), b.end());
  b.erase(std::remove_if(b.begin(), b.end(), [&](double v) { return v < dom.lo || v > dom.hi; }), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// y -> f(e^y) e^y
double log_density(const Measure& nu, double y) {
  const double x = std::exp(y);
  return nu.density(x) * x;
}

}  // namespace


std::string family_name(const NamedFamily& f) {
  return std::visit(overloaded{
                        [](const family::Dirac&) { return std::string("dirac"); },
                        [](const family::Lambda&) { return std::string("lambda"); },
                        [](const family::HalfNormal&) { return std::string("half_normal"); },
                        [](const family::Gamma&) { return std::string("gamma"); },
                        [](const family::Beta&) { return std::string("beta"); },
                        [](const family::MarchenkoPastur&) { return std::string("marchenko_pastur"); },
                        [](const family::MarchenkoPasturInverse&) {
                          return std::string("marchenko_pastur_inverse");
                        },
                        [](const family::BooleanStable&) { return std::string("boolean_stable"); },
                        [](const family::UniformInterval&) { return std::string("uniform"); },
                        [](const family::LogNormal&) { return std::string("log_normal"); },
                    },
                    f);
}

// --- Measure -----------------------------------------------------------------

Measure Measure::atomic(std::vector<Atom> atoms, double tol_mass) {
  require(!atoms.empty(), "atomic: at least one atom required");
  double mass = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(finite_positive(atoms[i].weight), "atomic: weights must be > 0 (atom " + std::to_string(i) + ")");
    require(finite_positive(atoms[i].location), "atomic: locations must be > 0 (atom " + std::to_string(i) + ")");
    if (i > 0) require(atoms[i].location > atoms[i - 1].location, "atomic: locations must be strictly increasing");
    mass += atoms[i].weight;
  }
  require(std::abs(mass - 1.0) <= tol_mass, "atomic: weights sum to " + fmt(mass) + ", not 1 (mass)");
  Measure m;
  m.atoms_ = std::move(atoms);
  m.support_ = {m.atoms_.front().location, m.atoms_.back().location};
  m.log_domain_ = {std::log(m.support_.lo), std::log(m.support_.hi)};
  return m;
}

Measure Measure::grid(std::vector<double> x, std::vector<double> f, double tol_mass) {
  require(x.size() == f.size(), "grid: x and f must have the same length");
  require(x.size() >= 2, "grid: at least two abscissae required");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(finite_positive(x[i]), "grid: abscissae must be > 0");
    require(std::isfinite(f[i]) && f[i] >= 0.0, "grid: density values must be >= 0");
    if (i > 0) require(x[i] > x[i - 1], "grid: abscissae must be strictly increasing");
  }
  Measure m;
  m.is_grid_ = true;
  m.grid_x_ = std::move(x);
  m.grid_f_ = std::move(f);
  m.grid_cdf_ = cumulative(m.grid_x_, m.grid_f_);
  const double mass = m.grid_cdf_.back();
  require(std::abs(mass - 1.0) <= tol_mass, "grid: trapezoid mass is " + fmt(mass) + ", not 1 (mass)");
  m.finish_density_setup();
  return m;
}

Measure Measure::grid_normalized(std::vector<double> x, std::vector<double> f) {
  require(x.size() == f.size() && x.size() >= 2, "grid: need matching x/f with at least two points");
  const auto c = cumulative(x, f);
  require(c.back() > 0.0 && std::isfinite(c.back()), "grid: density has no mass");
  for (double& v : f) v /= c.back();
  return grid(std::move(x), std::move(f), 1e-9);
}

Measure Measure::named(const NamedFamily& fam) {
  validate(fam);
  Measure m;
  m.named_ = fam;
  m.support_ = named_support(fam);
  if (const auto* d = std::get_if<family::Dirac>(&fam)) {
    m.atoms_ = {Atom{1.0, d->c}};
    m.log_domain_ = {std::log(d->c), std::log(d->c)};
    return m;
  }
  m.finish_density_setup();
  return m;
}

void Measure::finish_density_setup() {
  const double tail = Tolerances{}.tol_tail;
  if (is_grid_) {
    support_ = {grid_x_.front(), grid_x_.back()};
    log_domain_ = {std::log(grid_x_.front()), std::log(grid_x_.back())};
    for (std::size_t i = 1; i + 1 < grid_x_.size(); ++i) log_kinks_.push_back(std::log(grid_x_[i]));
    runs_.clear();
    for (std::size_t i = 0; i + 1 < grid_x_.size(); ++i) {
      if (grid_f_[i] > 0.0 || grid_f_[i + 1] > 0.0) {
        if (!runs_.empty() && runs_.back().hi == grid_x_[i]) runs_.back().hi = grid_x_[i + 1];
        else runs_.push_back({grid_x_[i], grid_x_[i + 1]});
      }
    }
    return;
  }
  // Infinite ends are cut where the remaining mass drops below tol_tail;
  // the positive run follows the cut so that kernel singularities are only
  // reported where the integration domain actually has mass.
  const double lo = support_.lo > 0.0 ? std::log(support_.lo) : std::log(quantile(tail));
  const double hi = std::isfinite(support_.hi) ? std::log(support_.hi) : std::log(quantile(1.0 - tail));
  runs_ = {{std::exp(lo), std::exp(hi)}};
  if (support_.lo > 0.0) runs_.front().lo = support_.lo;
  if (std::isfinite(support_.hi)) runs_.front().hi = support_.hi;
  log_domain_ = {lo, hi};
}

MeasureKind Measure::kind() const {
  if (is_grid_) return MeasureKind::grid;
  if (std::holds_alternative<NamedFamily>(named_)) return MeasureKind::named;
  return MeasureKind::atomic;
}

const NamedFamily* Measure::family() const { return std::get_if<NamedFamily>(&named_); }

std::string Measure::describe() const {
  if (is_grid_) return "grid(" + std::to_string(grid_x_.size()) + " points)";
  const auto* fam = family();
  if (fam == nullptr) return "atomic(" + std::to_string(atoms_.size()) + " atoms)";
  const std::string name = family_name(*fam);
  return std::visit(overloaded{
                        [&](const family::Dirac& f) { return name + "(c=" + fmt(f.c) + ")"; },
                        [&](const family::Lambda& f) { return name + "(b=" + fmt(f.b) + ")"; },
                        [&](const family::HalfNormal& f) { return name + "(t=" + fmt(f.t) + ")"; },
                        [&](const family::Gamma& f) {
                          return name + "(p=" + fmt(f.p) + ", theta=" + fmt(f.theta) + ")";
                        },
                        [&](const family::Beta& f) { return name + "(p=" + fmt(f.p) + ", q=" + fmt(f.q) + ")"; },
                        [&](const family::BooleanStable& f) { return name + "(alpha=" + fmt(f.alpha) + ")"; },
                        [&](const family::UniformInterval& f) {
                          return name + "(alpha=" + fmt(f.lo) + ", beta=" + fmt(f.hi) + ")";
                        },
                        [&](const family::LogNormal& f) { return name + "(m=" + fmt(f.m) + ", s=" + fmt(f.s) + ")"; },
                        [&](const auto&) { return name; },
                    },
                    *fam);
}

double Measure::density(double x) const {
  if (!has_density()) fail(ErrorCode::AtomicHasNoDensity, describe() + " is atomic");
  if (is_grid_) {
    if (!(x >= grid_x_.front() && x <= grid_x_.back())) return 0.0;
    const std::size_t i = cell_of(grid_x_, x);
    const double w = (x - grid_x_[i]) / (grid_x_[i + 1] - grid_x_[i]);
    return grid_f_[i] + w * (grid_f_[i + 1] - grid_f_[i]);
  }
  return named_density(*family(), x);
}

double Measure::cdf(double x) const {
  if (!has_density() && family() == nullptr) {
    double c = 0.0;
    for (const auto& a : atoms_) if (a.location <= x) c += a.weight;
    return std::min(c, 1.0);
  }
  if (is_grid_) {
    if (x <= grid_x_.front()) return 0.0;
    if (x >= grid_x_.back()) return 1.0;
    const std::size_t i = cell_of(grid_x_, x);
    const double h = x - grid_x_[i];
    const double fx = density(x);
    return std::min(grid_cdf_[i] + 0.5 * (grid_f_[i] + fx) * h, 1.0);
  }
  return named_cdf(*family(), x, false);
}

double Measure::sf(double x) const {
  if (!has_density() && family() == nullptr) {
    double c = 0.0;
    for (const auto& a : atoms_) if (a.location > x) c += a.weight;
    return std::min(c, 1.0);
  }
  if (is_grid_) {
    if (x <= grid_x_.front()) return 1.0;
    if (x >= grid_x_.back()) return 0.0;
    return std::max(grid_cdf_.back() - cdf(x), 0.0);
  }
  return named_cdf(*family(), x, true);
}

double Measure::quantile(double p) const {
  if (!(p > 0.0)) return support_.lo;
  if (!(p < 1.0)) return support_.hi;
  if (!has_density()) {
    double c = 0.0;
    for (const auto& a : atoms_) {
      c += a.weight;
      if (c >= p) return a.location;
    }
    return atoms_.back().location;
  }
  // Bisection in log x; upper tail handled through sf for precision.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  auto below = [&](double y) {
    const double x = std::exp(y);
    return upper ? sf(x) > target : cdf(x) < target;
  };
  double ylo = support_.lo > 0.0 ? std::log(support_.lo) : -1.0;
  double yhi = std::isfinite(support_.hi) ? std::log(support_.hi) : 1.0;
  for (double step = 1.0; below(ylo) == false && step < 1e3; step *= 2.0) {
    ylo -= step;
    if (support_.lo > 0.0 && ylo < std::log(support_.lo)) {
      ylo = std::log(support_.lo);
      break;
    }
  }
  for (double step = 1.0; below(yhi) == true && step < 1e3; step *= 2.0) {
    yhi += step;
    if (std::isfinite(support_.hi) && yhi > std::log(support_.hi)) {
      yhi = std::log(support_.hi);
      break;
    }
  }
  ylo = std::max(ylo, -700.0);
  yhi = std::min(yhi, 700.0);
  const auto [a, b] = roots::bisect_boundary(below, ylo, yhi, 200);
  return std::exp(0.5 * (a + b));
}

bool Measure::density_positive_near(double x) const {
  return std::any_of(runs_.begin(), runs_.end(), [x](const Interval& r) { return r.interior(x); });
}

// --- operations ------------------------------------------------------------------

double density_at(const Measure& nu, double x) { return nu.density(x); }

namespace {

template <class T, class K>
T integrate_impl(const Measure& nu, const K& kernel, const Tolerances& tol, std::span<const KernelFeature> features) {
  if (!nu.has_density()) {
    T sum{};
    for (const auto& a : nu.atoms()) sum += a.weight * kernel(a.location);
    return sum;
  }
  const Interval dom = nu.log_domain();
  std::vector<double> breaks(nu.log_kinks().begin(), nu.log_kinks().end());
  for (const auto& f : features) feature_breaks(f, dom, breaks);
  breaks = finalize_breaks(std::move(breaks), dom);
  auto g = [&](double y) -> T {
    const double p = log_density(nu, y);
    if (p == 0.0) return T{};
    return kernel(std::exp(y)) * p;
  };
  const auto res = quad::integrate(g, std::span<const double>(breaks), tol.quad());
  if (!res.converged) {
    fail(ErrorCode::NonIntegrable, "quadrature did not converge against " + nu.describe() +
                                       " (error " + fmt(res.error) + ", |integral| " + fmt(res.abs_value) + ")");
  }
  return res.value;
}

}  // namespace

double integrate(const Measure& nu, const std::function<double(double)>& kernel, const Tolerances& tol,
                 std::span<const KernelFeature> features) {
  return integrate_impl<double>(nu, kernel, tol, features);
}

std::complex<double> integrate_complex(const Measure& nu, const std::function<std::complex<double>(double)>& kernel,
                                       const Tolerances& tol, std::span<const KernelFeature> features) {
  return integrate_impl<std::complex<double>>(nu, kernel, tol, features);
}

double poisson_integral(const Measure& nu, double r, double theta, const PoissonNumerator& h,
                        const Tolerances& tol) {
  if (!(r > 0.0) || !(theta >= 0.0) || !(theta < pi)) {
    fail(ErrorCode::DomainError, "poisson_integral needs r > 0 and theta in [0, pi)");
  }
  const double half = std::sin(0.5 * theta);
  const double gap = 4.0 * half * half;  // 2 (1 - cos theta)

  if (!nu.has_density()) {
    double sum = 0.0;
    for (const auto& a : nu.atoms()) {
      const double s = r * a.location;
      const double sm1 = std::fma(r, a.location, -1.0);
      const double den = sm1 * sm1 + s * gap;
      if (den == 0.0) return std::copysign(kInf, h(s, sm1));
      sum += a.weight * h(s, sm1) / den;
    }
    return sum;
  }

  const Interval dom = nu.log_domain();
  const double log_r = std::log(r);
  const auto qopt = tol.quad();

  auto y_integrand = [&](double y) {
    const double p = log_density(nu, y);
    if (p == 0.0) return 0.0;
    const double s = std::exp(y + log_r);
    const double sm1 = std::expm1(y + log_r);
    return h(s, sm1) * p / (sm1 * sm1 + s * gap);
  };
  auto y_integral = [&](Interval part, const KernelFeature& feat, bool allow_divergence) {
    if (!(part.hi > part.lo)) return 0.0;
    std::vector<double> breaks;
    for (double k : nu.log_kinks()) if (part.interior(k)) breaks.push_back(k);
    feature_breaks(feat, part, breaks);
    breaks = finalize_breaks(std::move(breaks), part);
    const auto res = quad::integrate(y_integrand, std::span<const double>(breaks), qopt);
    if (!res.converged) {
      if (allow_divergence) return kInf;
      fail(ErrorCode::NonIntegrable, "poisson_integral did not converge against " + nu.describe());
    }
    return res.value;
  };

  if (theta == 0.0) {
    if (nu.density_positive_near(1.0 / r)) return kInf;
    return y_integral(dom, KernelFeature{1.0 / r, 0.0}, true);
  }

  const double c = std::cos(theta);
  const double sigma = std::sin(theta);
  if (c <= 0.0 || sigma >= 0.25 * c) {
    return y_integral(dom, KernelFeature{c > 0.0 ? c / r : 0.0, sigma / r}, false);
  }

  // Narrow Lorentzian peak at s = r xi = cos(theta) of half-width sin(theta):
  // integrate the central window in v = s - cos(theta), where the kernel is
  // exactly 1 / (v^2 + sin^2 theta), with panels graded by sin(theta).
  const double s_lo = r * std::exp(dom.lo);
  const double s_hi = r * std::exp(dom.hi);
  const double w_lo = std::max(0.5 * c, s_lo);
  const double w_hi = std::min(2.0 * c, s_hi);
  const KernelFeature feat{c / r, sigma / r};
  if (!(w_hi > w_lo)) return y_integral(dom, feat, false);

  double total = 0.0;
  total += y_integral({dom.lo, std::min(std::log(w_lo / r), dom.hi)}, feat, false);
  total += y_integral({std::max(std::log(w_hi / r), dom.lo), dom.hi}, feat, false);

  const double v_lo = w_lo - c;
  const double v_hi = w_hi - c;
  std::vector<double> breaks{v_lo, v_hi};
  if (v_lo < 0.0 && v_hi > 0.0) breaks.push_back(0.0);
  for (double d = sigma; d < 4.0 * c; d *= 4.0) {
    for (double v : {d, -d}) {
      if (v > v_lo && v < v_hi) breaks.push_back(v);
    }
  }
  for (double k : nu.log_kinks()) {
    const double v = r * std::exp(k) - c;
    if (v > v_lo && v < v_hi) breaks.push_back(v);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto v_integrand = [&](double v) {
    const double s = c + v;
    const double f = nu.density(s / r);
    if (f == 0.0) return 0.0;
    return h(s, v - 0.5 * gap) * f / (r * (v * v + sigma * sigma));
  };
  const auto res = quad::integrate(v_integrand, std::span<const double>(breaks), qopt);
  if (!res.converged) {
    fail(ErrorCode::NonIntegrable, "poisson_integral did not converge against " + nu.describe() + " at r = " +
                                       fmt(r) + ", theta = " + fmt(theta) + " (error " + fmt(res.error) +
                                       ", |integral| " + fmt(res.abs_value) + ")");
  }
  return total + res.value;
}

double f_blowup(const Measure& nu, double r, const Tolerances& tol) {
  if (!(r > 0.0)) fail(ErrorCode::DomainError, "f_blowup needs r > 0");
  return poisson_integral(nu, r, 0.0, [](double s, double) { return s; }, tol);
}

Measure to_grid(const Measure& nu, int points) {
  if (!nu.has_density()) fail(ErrorCode::AtomicHasNoDensity, nu.describe() + " cannot be tabulated");
  if (nu.kind() == MeasureKind::grid) return nu;
  const Interval dom = nu.log_domain();
  std::vector<double> x(static_cast<std::size_t>(points)), f(x.size());
  for (int i = 0; i < points; ++i) {
    const double y = dom.lo + (dom.hi - dom.lo) * i / (points - 1);
    x[static_cast<std::size_t>(i)] = std::exp(y);
  }
  x.front() = std::exp(dom.lo);
  x.back() = std::exp(dom.hi);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = nu.density(x[i]);
    if (!std::isfinite(v) || (v == 0.0 && (i == 0 || i + 1 == x.size()))) {
      // Endpoint singularity or closed-interval edge: sample just inside.
      const double inside = (i == 0) ? x[i] * (1.0 + 1e-12) : x[i] * (1.0 - 1e-12);
      v = nu.density(inside);
      if (!std::isfinite(v)) v = (i == 0) ? nu.density(x[1]) : nu.density(x[x.size() - 2]);
    }
    f[i] = v;
  }
  return Measure::grid_normalized(std::move(x), std::move(f));
}

Measure invert_measure(const Measure& nu) {
  if (const auto* fam = nu.family()) {
    std::optional<NamedFamily> image = std::visit(
        overloaded{
            [](const family::Dirac& f) -> std::optional<NamedFamily> { return family::Dirac{1.0 / f.c}; },
            [](const family::Lambda& f) -> std::optional<NamedFamily> { return f; },
            [](const family::BooleanStable& f) -> std::optional<NamedFamily> { return f; },
            [](const family::LogNormal& f) -> std::optional<NamedFamily> { return family::LogNormal{-f.m, f.s}; },
            [](const family::MarchenkoPastur&) -> std::optional<NamedFamily> {
              return family::MarchenkoPasturInverse{};
            },
            [](const family::MarchenkoPasturInverse&) -> std::optional<NamedFamily> {
              return family::MarchenkoPastur{};
            },
            [](const auto&) -> std::optional<NamedFamily> { return std::nullopt; },
        },
        *fam);
    if (image) return Measure::named(*image);
    return invert_measure(to_grid(nu));
  }
  if (nu.kind() == MeasureKind::atomic) {
    std::vector<Atom> inv;
    for (auto it = nu.atoms().rbegin(); it != nu.atoms().rend(); ++it) inv.push_back({it->weight, 1.0 / it->location});
    return Measure::atomic(std::move(inv), 1e-9);
  }
  const auto xs = nu.grid_x();
  const auto fs = nu.grid_f();
  std::vector<double> x(xs.size()), f(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t j = xs.size() - 1 - i;
    x[i] = 1.0 / xs[j];
    f[i] = fs[j] * xs[j] * xs[j];
  }
  return Measure::grid_normalized(std::move(x), std::move(f));
}

LogDensity pushforward_log(const Measure& nu, const RealGrid& grid) {
  if (!nu.has_density()) fail(ErrorCode::AtomicHasNoDensity, nu.describe() + " has no log density");
  if (grid.points < 2 || !(grid.hi > grid.lo)) fail(ErrorCode::DomainError, "pushforward_log: invalid grid");
  LogDensity out;
  out.y.resize(static_cast<std::size_t>(grid.points));
  out.p.resize(out.y.size());
  for (int i = 0; i < grid.points; ++i) {
    const double y = grid.lo + (grid.hi - grid.lo) * i / (grid.points - 1);
    out.y[static_cast<std::size_t>(i)] = y;
    out.p[static_cast<std::size_t>(i)] = log_density(nu, y);
  }
  return out;
}

bool is_mult_symmetric(const Measure& nu, double tol) {
  if (!nu.has_density()) {
    const Measure inv = invert_measure(nu);
    const auto a = nu.atoms();
    const auto b = inv.atoms();
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::abs(a[i].weight - b[i].weight) > tol) return false;
      if (std::abs(a[i].location - b[i].location) > tol * a[i].location) return false;
    }
    return true;
  }
  const Interval dom = nu.log_domain();
  const double reach = std::max(std::abs(dom.lo), std::abs(dom.hi));
  constexpr int n = 4097;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = -reach + 2.0 * reach * i / (n - 1);
    // P(1/X <= e^y) = P(X >= e^{-y})
    worst = std::max(worst, std::abs(nu.cdf(std::exp(y)) - nu.sf(std::exp(-y))));
  }
  return worst <= tol;
}

}  // namespace freemult
