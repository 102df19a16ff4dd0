#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature over a piecewise
// partition. Works for real and std::complex<double> integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace freemult::quad {

struct Options {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  double abs_value = 0.0;  // integral of |f|, the scale for rel_tol
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kNodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrod{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for nodes kNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGauss{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  T value{};
  double error = 0.0;
  double abs_value = 0.0;
};

template <class T, class F>
Panel<T> gauss_kronrod_15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<T, 15> fv{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    fv[2 * j] = f(center - dx);
    fv[2 * j + 1] = f(center + dx);
  }
  fv[14] = f(center);

  T kronrod = fv[14] * kKronrod[7];
  T gauss = fv[14] * kGauss[3];
  double abs_sum = magnitude(fv[14]) * kKronrod[7];
  for (int j = 0; j < 7; ++j) {
    const T pair = fv[2 * j] + fv[2 * j + 1];
    kronrod += pair * kKronrod[j];
    abs_sum += (magnitude(fv[2 * j]) + magnitude(fv[2 * j + 1])) * kKronrod[j];
    if (j % 2 == 1) gauss += pair * kGauss[j / 2];
  }
  const T mean = kronrod * 0.5;
  double asc = magnitude(fv[14] - mean) * kKronrod[7];
  for (int j = 0; j < 7; ++j) {
    asc += (magnitude(fv[2 * j] - mean) + magnitude(fv[2 * j + 1] - mean)) * kKronrod[j];
  }

  Panel<T> p;
  p.a = a;
  p.b = b;
  p.value = kronrod * half;
  p.abs_value = abs_sum * std::abs(half);
  asc *= std::abs(half);
  // QUADPACK error scaling.
  double err = magnitude((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (p.abs_value > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * p.abs_value);
  }
  if (!std::isfinite(magnitude(p.value))) err = std::numeric_limits<double>::infinity();
  p.error = err;
  return p;
}

}  // namespace detail

/// Integrates f over [breaks.front(), breaks.back()], starting from the panels
/// defined by consecutive breakpoints and bisecting the panel with the largest
/// error estimate until the total error drops below
/// max(abs_tol, rel_tol * integral of |f|).
template <class F>
auto integrate(F&& f, std::span<const double> breaks, const Options& opt = {})
    -> Result<decltype(f(0.0))> {
  using T = decltype(f(0.0));
  Result<T> out;
  if (breaks.size() < 2) return out;

  std::vector<detail::Panel<T>> heap;
  heap.reserve(static_cast<std::size_t>(opt.max_panels) + breaks.size());
  auto by_error = [](const detail::Panel<T>& x, const detail::Panel<T>& y) { return x.error < y.error; };
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    heap.push_back(detail::gauss_kronrod_15<T>(f, breaks[i], breaks[i + 1]));
    out.evaluations += 15;
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&] {
    T value{};
    double err = 0.0;
    double abs_value = 0.0;
    for (const auto& p : heap) {
      value += p.value;
      err += p.error;
      abs_value += p.abs_value;
    }
    out.value = value;
    out.error = err;
    out.abs_value = abs_value;
  };
  totals();

  constexpr double eps = std::numeric_limits<double>::epsilon();
  int since_refresh = 0;
  while (!heap.empty()) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * out.abs_value);
    if (out.error <= tol) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(heap.size()) >= opt.max_panels) break;
    std::pop_heap(heap.begin(), heap.end(), by_error);
    detail::Panel<T> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 8.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      // Cannot split further; freeze this panel with its current estimate.
      worst.error = 0.0;
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), by_error);
      totals();
      if (out.error > std::max(opt.abs_tol, opt.rel_tol * out.abs_value) && heap.front().error == 0.0) break;
      continue;
    }
    auto left = detail::gauss_kronrod_15<T>(f, worst.a, mid);
    auto right = detail::gauss_kronrod_15<T>(f, mid, worst.b);
    out.evaluations += 30;
    out.value += left.value + right.value - worst.value;
    out.error += left.error + right.error - worst.error;
    out.abs_value += left.abs_value + right.abs_value - worst.abs_value;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    // Running sums drift; recompute now and then.
    if (++since_refresh == 64) {
      totals();
      since_refresh = 0;
    }
  }
  totals();
  if (!out.converged) out.converged = out.error <= std::max(opt.abs_tol, opt.rel_tol * out.abs_value);
  return out;
}

template <class F>
auto integrate(F&& f, double a, double b, const Options& opt = {}) {
  const std::array<double, 2> br{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(br), opt);
}

}  // namespace freemult::quad
