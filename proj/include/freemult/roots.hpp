#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace freemult::roots {

struct Bracketed {
  double x = 0.0;
  double residual = 0.0;  // g(x)
  int evaluations = 0;
};

/// Root of g on [lo, hi] given g(lo), g(hi) of opposite signs. Stops once
/// |g| <= residual_tol or the bracket has shrunk to a few ulps; returns the
/// best point seen.
template <class G>
Bracketed solve(G&& g, double lo, double hi, double g_lo, double g_hi, double residual_tol,
                std::uintmax_t max_iter = 200) {
  Bracketed best{std::abs(g_lo) < std::abs(g_hi) ? lo : hi,
                 std::abs(g_lo) < std::abs(g_hi) ? g_lo : g_hi, 0};
  if (g_lo == 0.0) return {lo, 0.0, 0};
  if (g_hi == 0.0) return {hi, 0.0, 0};
  auto wrapped = [&](double x) {
    const double v = g(x);
    ++best.evaluations;
    if (std::abs(v) < std::abs(best.residual)) {
      best.x = x;
      best.residual = v;
    }
    return v;
  };
  auto done = [&](double a, double b) {
    if (std::abs(best.residual) <= residual_tol) return true;
    return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
  };
  std::uintmax_t iters = max_iter;
  try {
    boost::math::tools::toms748_solve(wrapped, lo, hi, g_lo, g_hi, done, iters);
  } catch (const std::exception&) {
    // toms748 throws when the residual turns out not to bracket (noisy g);
    // the best point seen so far is still the answer.
  }
  return best;
}

/// Plain bisection on a predicate-defined boundary: pred(lo) != pred(hi);
/// returns the final (lo, hi) pair after `iterations` halvings or once the
/// interval is a few ulps wide.
template <class P>
std::pair<double, double> bisect_boundary(P&& pred, double lo, double hi, int iterations) {
  const bool at_lo = pred(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (pred(mid) == at_lo) lo = mid; else hi = mid;
  }
  return {lo, hi};
}

/// Minimum of a unimodal function on [lo, hi] (Brent).
template <class F>
std::pair<double, double> minimize(F&& f, double lo, double hi, int bits = 52) {
  std::uintmax_t iters = 500;
  return boost::math::tools::brent_find_minima(std::forward<F>(f), lo, hi, bits, iters);
}

}  // namespace freemult::roots
