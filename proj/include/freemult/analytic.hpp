#pragma once

// psi-transform, its derivative, the Pick transform of a measure on the real
// line and the Sigma-transform of the free positive Brownian motion.

#include <complex>
#include <vector>

#include "freemult/measures.hpp"

namespace freemult {

using cplx = std::complex<double>;

struct ComplexPoint {
  double re = 0.0;
  double im = 0.0;
  [[nodiscard]] cplx value() const { return {re, im}; }
};

/// Rectangle in the upper half-plane sampled on a tensor grid.
struct HalfPlaneGrid {
  double re_lo = -10.0;
  double re_hi = 10.0;
  int re_count = 64;
  double im_lo = 1e-3;
  double im_hi = 10.0;
  int im_count = 64;
  bool im_log = true;

  /// Throws DomainError unless im_lo > 0, both counts >= 2 and ranges are ordered.
  void validate() const;
  /// Row-major: re varies fastest.
  [[nodiscard]] std::vector<cplx> points() const;
};

/// psi(z) = int x z / (1 - x z) d nu(x). DomainError for z in [0, inf).
cplx psi(const Measure& nu, cplx z, const Tolerances& tol = {});
/// psi'(z) = int x / (1 - x z)^2 d nu(x).
cplx psi_prime(const Measure& nu, cplx z, const Tolerances& tol = {});

/// A finite measure on the whole real line: atoms at arbitrary real
/// locations plus an optional piecewise-linear density on a grid.
struct RealLineMeasure {
  std::vector<Atom> atoms;   // locations may be <= 0
  std::vector<double> x;     // strictly increasing
  std::vector<double> f;     // >= 0, linear between nodes, zero outside

  static RealLineMeasure point(double c, double weight = 1.0);
  static RealLineMeasure density(std::vector<double> x, std::vector<double> f);
  /// tau = x d mu(x) for a measure mu on (0, inf); density measures are
  /// tabulated on `points` log-spaced nodes.
  static RealLineMeasure x_times(const Measure& mu, int points = 4096);
  void validate() const;
};

struct PickValue {
  cplx value;       // P(z)
  cplx derivative;  // P'(z) = int tau(dx) / (x - z)^2
};

/// P(z) = int (1 + x z) / ((x - z)(1 + x^2)) tau(dx), closed form per cell.
/// DomainError if Im z <= 0.
PickValue pick_transform(const RealLineMeasure& tau, cplx z);

/// exp((t/2)(z + 1)/(z - 1)); DomainError at z = 1 or t < 0.
cplx sigma_bm_Sigma(double t, cplx z);

}  // namespace freemult
