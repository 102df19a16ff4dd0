#include "freemult/unimodality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "freemult/errors.hpp"
#include "parallel.hpp"

namespace freemult {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::unimodal: return "unimodal";
    case Verdict::not_unimodal: return "not_unimodal";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

struct Extremum {
  std::size_t i;
  bool is_max;
};

struct Analysis {
  ModeReport report;
  std::vector<std::size_t> max_index;
};

// Vertex of the parabola through three points, clamped to their span.
double parabola_vertex(double x0, double x1, double x2, double y0, double y1, double y2) {
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a < 0.0)) return x1;
  const double v = 0.5 * (x0 + x1) - d01 / (2.0 * a);
  return std::clamp(v, x0, x2);
}

double refine_at(std::span<const double> x, std::span<const double> v, std::size_t i) {
  if (i == 0 || i + 1 >= x.size()) return x[i];
  return parabola_vertex(x[i - 1], x[i], x[i + 1], v[i - 1], v[i], v[i + 1]);
}

Analysis analyze(std::span<const double> x, std::span<const double> v, double eps_rel) {
  const std::size_t n = x.size();
  if (v.size() != n) fail(ErrorCode::DomainError, "x and values differ in length");
  if (n < 64) fail(ErrorCode::DomainError, "mode counting needs at least 64 samples");
  if (!(eps_rel > 0.0 && eps_rel < 0.1)) fail(ErrorCode::DomainError, "hysteresis must lie in (0, 0.1)");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(v[i])) fail(ErrorCode::DomainError, "samples must be finite");
    if (i > 0 && !(x[i] > x[i - 1])) fail(ErrorCode::DomainError, "abscissae must be strictly increasing");
  }
  const double vmax = *std::max_element(v.begin(), v.end());
  if (!(vmax > 0.0)) fail(ErrorCode::DegenerateInput, "curve is identically zero");
  const double eps = eps_rel * vmax;

  std::vector<Extremum> ext;
  bool rising = true;
  std::size_t peak = 0;
  std::size_t trough = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (rising) {
      if (v[i] > v[peak]) {
        peak = i;
      } else if (v[i] < v[peak] - eps) {
        ext.push_back({peak, true});
        rising = false;
        trough = i;
      }
    } else {
      if (v[i] < v[trough]) {
        trough = i;
      } else if (v[i] > v[trough] + eps) {
        ext.push_back({trough, false});
        rising = true;
        peak = i;
      }
    }
  }
  if (rising) ext.push_back({peak, true});

  Analysis out;
  ModeReport& rep = out.report;
  rep.tolerance = eps;
  for (const auto& e : ext) {
    if (!e.is_max) continue;
    out.max_index.push_back(e.i);
    rep.modes.push_back(refine_at(x, v, e.i));
  }
  rep.num_local_maxima = static_cast<int>(out.max_index.size());

  bool levels_ok = true;
  const double band = 0.5 * eps;
  for (int k = 1; k <= kLevelCount; ++k) {
    const double a = vmax * k / (kLevelCount + 1);
    bool above = v[0] >= a;
    int components = above ? 1 : 0;
    int crossings = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (!above && v[i] > a + band) {
        above = true;
        ++components;
        ++crossings;
      } else if (above && v[i] < a - band) {
        above = false;
        ++crossings;
      }
    }
    rep.max_level_crossings = std::max(rep.max_level_crossings, crossings);
    if (components > 1) levels_ok = false;
  }

  const std::size_t i0 = out.max_index.empty() ? 0 : out.max_index.front();
  double res = 0.0;
  if (i0 > 0) res = std::max(res, x[i0] - x[i0 - 1]);
  if (i0 + 1 < n) res = std::max(res, x[i0 + 1] - x[i0]);
  rep.resolution = res;

  if (rep.num_local_maxima <= 1 && levels_ok) {
    rep.verdict = Verdict::unimodal;
    return out;
  }
  rep.verdict = Verdict::not_unimodal;
  for (std::size_t k = 1; k < ext.size(); ++k) {
    if (ext[k].i - ext[k - 1].i < 2) {
      rep.verdict = Verdict::inconclusive;
      rep.note = "extrema separated by less than two grid steps";
      break;
    }
  }
  return out;
}

}  // namespace

ModeReport count_modes(std::span<const double> x, std::span<const double> v, double eps_rel) {
  return analyze(x, v, eps_rel).report;
}

namespace {

// e^y f(e^y), stepping inward from an integrable endpoint singularity.
double log_density(const Measure& nu, double y, double inward) {
  double p = std::exp(y) * nu.density(std::exp(y));
  for (int k = 0; k < 40 && !std::isfinite(p); ++k) {
    inward *= 0.5;
    y += inward;
    p = std::exp(y) * nu.density(std::exp(y));
  }
  if (!std::isfinite(p)) fail(ErrorCode::NonIntegrable, "density is not finite near the domain end");
  return p;
}

}  // namespace

ModeReport is_log_unimodal(const Measure& nu, double eps_rel, int points) {
  if (!nu.has_density()) fail(ErrorCode::AtomicHasNoDensity, "log-unimodality needs an absolutely continuous measure");
  if (points < 64) fail(ErrorCode::DomainError, "at least 64 grid points required");
  const Interval dom = nu.log_domain();
  const double h = (dom.hi - dom.lo) / (points - 1);
  std::vector<double> y(static_cast<std::size_t>(points));
  std::vector<double> p(y.size());
  for (int k = 0; k < points; ++k) {
    y[k] = (k == points - 1) ? dom.hi : dom.lo + h * k;
    const double in = (k == 0) ? 0.25 * h : (k == points - 1 ? -0.25 * h : 0.0);
    p[k] = log_density(nu, y[k], in);
  }
  Analysis a = analyze(y, p, eps_rel);
  ModeReport& rep = a.report;

  // Resample +-2 coarse steps around each mode on 201 points.
  constexpr int kFine = 201;
  double fine_step = 0.0;
  for (std::size_t m = 0; m < a.max_index.size(); ++m) {
    const double c = y[a.max_index[m]];
    const double lo = std::max(dom.lo, c - 2.0 * h);
    const double hi = std::min(dom.hi, c + 2.0 * h);
    const double step = (hi - lo) / (kFine - 1);
    std::vector<double> fy(kFine);
    std::vector<double> fp(kFine);
    for (int k = 0; k < kFine; ++k) {
      fy[k] = lo + step * k;
      const double in = (k == 0 && lo == dom.lo) ? 0.25 * step : (k == kFine - 1 && hi == dom.hi ? -0.25 * step : 0.0);
      fp[k] = log_density(nu, fy[k], in);
    }
    const auto it = std::max_element(fp.begin(), fp.end());
    const auto j = static_cast<std::size_t>(it - fp.begin());
    rep.modes[m] = std::exp(refine_at(fy, fp, j));
    if (m == 0) fine_step = step;
  }
  std::sort(rep.modes.begin(), rep.modes.end());
  rep.resolution = rep.modes.empty() ? 0.0 : rep.modes.front() * (std::exp(fine_step) - 1.0);
  return rep;
}

ModeReport is_log_unimodal(const DensityCurve& curve, double eps_rel) {
  std::vector<double> y;
  std::vector<double> p;
  y.reserve(curve.x.size());
  p.reserve(curve.x.size());
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    if (!(curve.x[i] > 0.0)) continue;
    const double yi = std::log(curve.x[i]);
    if (!y.empty() && !(yi > y.back())) continue;
    y.push_back(yi);
    p.push_back(curve.x[i] * curve.q[i]);
  }
  Analysis a = analyze(y, p, eps_rel);
  ModeReport& rep = a.report;
  double mode_x = 0.0;
  for (auto& m : rep.modes) m = std::exp(m);
  if (!a.max_index.empty()) mode_x = std::exp(y[a.max_index.front()]);
  rep.resolution = mode_x * (std::exp(rep.resolution) - 1.0);
  const std::size_t comps = curve.support.intervals.size();
  if (comps > 1) {
    rep.verdict = Verdict::not_unimodal;
    char buf[96];
    std::snprintf(buf, sizeof buf, "support has %zu components", comps);
    rep.note = buf;
  }
  return rep;
}

namespace {

std::string format_z(cplx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.6g%+.6gi", z.real(), z.imag());
  return buf;
}

}  // namespace

PickReport pick_inequality_check(const Measure& mu, double c, const HalfPlaneGrid& grid, const Tolerances& tol) {
  if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorCode::DomainError, "c must be positive");
  const auto zs = grid.points();
  const auto ws = detail::parallel_map<cplx>(
      zs.size(), [&](std::size_t k) { return zs[k] * (1.0 - c * zs[k]) * psi_prime(mu, zs[k], tol); });
  std::vector<double> im(zs.size());
  PickReport rep;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    im[k] = ws[k].imag();
    rep.scale = std::max(rep.scale, std::abs(ws[k]));
  }
  rep.tolerance = tol.tol_pick * rep.scale;
  rep.extreme = *std::min_element(im.begin(), im.end());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (im[k] < -rep.tolerance) rep.violations.push_back({zs[k], im[k]});
  }
  rep.holds = rep.violations.empty();
  if (rep.holds) {
    rep.evidence = "supporting: inequality holds on the finite grid only";
  } else {
    const auto worst = std::min_element(rep.violations.begin(), rep.violations.end(),
                                        [](const auto& a, const auto& b) { return a.value < b.value; });
    rep.evidence = "certificate: violated at z = " + format_z(worst->z);
  }
  return rep;
}

PickReport general_pick_check(const RealLineMeasure& tau, double c, const HalfPlaneGrid& grid, const Tolerances& tol) {
  if (!std::isfinite(c)) fail(ErrorCode::DomainError, "c must be finite");
  tau.validate();
  const auto zs = grid.points();
  std::vector<double> im(zs.size());
  PickReport rep;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const cplx w = (zs[k] - c) * pick_transform(tau, zs[k]).derivative;
    im[k] = w.imag();
    rep.scale = std::max(rep.scale, std::abs(w));
  }
  rep.tolerance = tol.tol_pick * rep.scale;
  rep.extreme = *std::max_element(im.begin(), im.end());
  for (std::size_t k = 0; k < zs.size(); ++k) {
    if (im[k] > rep.tolerance) rep.violations.push_back({zs[k], im[k]});
  }
  rep.holds = rep.violations.empty();
  if (rep.holds) {
    rep.evidence = "supporting: inequality holds on the finite grid only";
  } else {
    const auto worst = std::max_element(rep.violations.begin(), rep.violations.end(),
                                        [](const auto& a, const auto& b) { return a.value < b.value; });
    rep.evidence = "certificate: violated at z = " + format_z(worst->z);
  }
  return rep;
}

double lambda_g_second_printed(double b, double x) {
  const double cb = std::cos(b);
  const double e = std::exp(x);
  const double d = 1.0 - 2.0 * e * cb + e * e;
  return 2.0 * e * (cb - 2.0 * e + e * e * cb) / (d * d);
}

double lambda_g_second(double b, double x) {
  const double cb = std::cos(b);
  const double ch = std::cosh(x);
  const double d = ch - cb;
  return (cb * ch - 1.0) / (d * d);
}

StrongCheck lambda_strong_check(double b) {
  if (!(b > 0.0 && b < M_PI)) fail(ErrorCode::DomainError, "b must lie in (0, pi)");
  StrongCheck out;
  out.cos_b = std::cos(b);
  out.g_second = [b](double x) { return lambda_g_second(b, x); };
  out.strongly_log_unimodal = out.cos_b <= 1e-15;
  if (out.strongly_log_unimodal) return out;
  for (int k = 0; k <= 2000; ++k) {
    const double x = 0.01 * k;
    if (lambda_g_second(b, x) > 0.0) {
      out.witness = x;
      return out;
    }
  }
  // cos b cosh x - 1 = 1 here.
  out.witness = std::acosh(2.0 / out.cos_b);
  return out;
}

}  // namespace freemult
