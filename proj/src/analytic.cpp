#include "freemult/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "freemult/errors.hpp"

namespace freemult {

void HalfPlaneGrid::validate() const {
  if (re_count < 2 || im_count < 2) fail(ErrorCode::DomainError, "half-plane grid needs at least 2 points per axis");
  if (!(im_lo > 0.0)) fail(ErrorCode::DomainError, "half-plane grid must lie in Im z > 0");
  if (!(re_hi > re_lo) || !(im_hi > im_lo)) fail(ErrorCode::DomainError, "half-plane grid ranges must be increasing");
}

std::vector<cplx> HalfPlaneGrid::points() const {
  validate();
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(re_count) * static_cast<std::size_t>(im_count));
  for (int j = 0; j < im_count; ++j) {
    const double u = static_cast<double>(j) / (im_count - 1);
    const double im = im_log ? im_lo * std::pow(im_hi / im_lo, u) : im_lo + (im_hi - im_lo) * u;
    for (int i = 0; i < re_count; ++i) {
      const double re = re_lo + (re_hi - re_lo) * static_cast<double>(i) / (re_count - 1);
      out.emplace_back(re, im);
    }
  }
  return out;
}

namespace {

void check_off_positive_axis(cplx z) {
  if (z.imag() == 0.0 && z.real() >= 0.0) fail(ErrorCode::DomainError, "z must lie off [0, inf)");
}

// 1 - x z vanishes near x = 1/z when z approaches the positive axis.
std::vector<KernelFeature> reciprocal_feature(cplx z) {
  const cplx w = 1.0 / z;
  if (w.real() > 0.0) return {KernelFeature{w.real(), std::abs(w.imag())}};
  return {};
}

}  // namespace

cplx psi(const Measure& nu, cplx z, const Tolerances& tol) {
  check_off_positive_axis(z);
  const auto feat = reciprocal_feature(z);
  return integrate_complex(nu, [z](double x) { return x * z / (1.0 - x * z); }, tol, feat);
}

cplx psi_prime(const Measure& nu, cplx z, const Tolerances& tol) {
  check_off_positive_axis(z);
  const auto feat = reciprocal_feature(z);
  return integrate_complex(
      nu,
      [z](double x) {
        const cplx d = 1.0 - x * z;
        return x / (d * d);
      },
      tol, feat);
}

RealLineMeasure RealLineMeasure::point(double c, double weight) {
  RealLineMeasure m;
  m.atoms.push_back({weight, c});
  return m;
}

RealLineMeasure RealLineMeasure::density(std::vector<double> x, std::vector<double> f) {
  RealLineMeasure m;
  m.x = std::move(x);
  m.f = std::move(f);
  m.validate();
  return m;
}

RealLineMeasure RealLineMeasure::x_times(const Measure& mu, int points) {
  RealLineMeasure m;
  if (!mu.has_density()) {
    for (const auto& a : mu.atoms()) m.atoms.push_back({a.weight * a.location, a.location});
    return m;
  }
  if (mu.kind() == MeasureKind::grid) {
    m.x.assign(mu.grid_x().begin(), mu.grid_x().end());
    m.f.resize(m.x.size());
    for (std::size_t i = 0; i < m.x.size(); ++i) m.f[i] = m.x[i] * mu.grid_f()[i];
    return m;
  }
  const auto g = to_grid(mu, points);
  return x_times(g, points);
}

void RealLineMeasure::validate() const {
  if (x.size() != f.size()) fail(ErrorCode::InvariantViolation, "real-line measure: x and f differ in length");
  if (x.size() == 1) fail(ErrorCode::InvariantViolation, "real-line measure: a density needs two nodes");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(f[i]) || f[i] < 0.0) {
      fail(ErrorCode::InvariantViolation, "real-line measure: non-finite or negative entry");
    }
    if (i > 0 && !(x[i] > x[i - 1])) fail(ErrorCode::InvariantViolation, "real-line measure: x must increase");
  }
  for (const auto& a : atoms) {
    if (!std::isfinite(a.location) || !(a.weight >= 0.0)) {
      fail(ErrorCode::InvariantViolation, "real-line measure: bad atom");
    }
  }
}

PickValue pick_transform(const RealLineMeasure& tau, cplx z) {
  if (!(z.imag() > 0.0)) fail(ErrorCode::DomainError, "pick_transform needs Im z > 0");
  PickValue out{{0.0, 0.0}, {0.0, 0.0}};
  // (1 + xz) / ((x - z)(1 + x^2)) = 1/(x - z) - x/(1 + x^2)
  for (const auto& a : tau.atoms) {
    const cplx d = a.location - z;
    out.value += a.weight * (1.0 / d - a.location / (1.0 + a.location * a.location));
    out.derivative += a.weight / (d * d);
  }
  // Im(x - z) = -Im z < 0 along the whole real line, so log(x - z) has no
  // branch crossing inside a cell.
  for (std::size_t k = 0; k + 1 < tau.x.size(); ++k) {
    const double a = tau.x[k], b = tau.x[k + 1];
    const double beta = (tau.f[k + 1] - tau.f[k]) / (b - a);
    const double alpha = tau.f[k] - beta * a;
    if (tau.f[k] == 0.0 && tau.f[k + 1] == 0.0) continue;
    const cplx fz = alpha + beta * z;
    const cplx da = a - z, db = b - z;
    const cplx dlog = std::log(db) - std::log(da);
    out.value += fz * dlog + beta * (b - a);
    out.value -= alpha * 0.5 * (std::log1p(b * b) - std::log1p(a * a)) + beta * ((b - a) - (std::atan(b) - std::atan(a)));
    out.derivative += fz * (1.0 / da - 1.0 / db) + beta * dlog;
  }
  return out;
}

cplx sigma_bm_Sigma(double t, cplx z) {
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::DomainError, "sigma_bm_Sigma needs t >= 0");
  if (z == cplx(1.0, 0.0)) fail(ErrorCode::DomainError, "sigma_bm_Sigma is singular at z = 1");
  if (t == 0.0) return {1.0, 0.0};
  return std::exp(0.5 * t * (z + 1.0) / (z - 1.0));
}

}  // namespace freemult
