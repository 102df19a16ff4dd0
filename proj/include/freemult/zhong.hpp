#pragma once

// Density of sigma_t [x] nu from the angle equation
//   Phi_r(theta) = (sin theta / theta) int r xi / |1 - r xi e^{i theta}|^2 d nu = 1/t,
// the set V = {f > 1/t} and the homeomorphism Lambda of (0, inf):
//   x q_t(x) = u_t(Lambda^{-1}(1/x)) / (pi t).

#include <optional>
#include <string>
#include <vector>

#include "freemult/measures.hpp"

namespace freemult {

struct ZhongContext {
  Measure nu;
  double t;
  Tolerances tol;

  /// Throws DomainError unless t > 0 and the tolerances are positive.
  ZhongContext(Measure nu, double t, Tolerances tol = {});
};

double theta_equation_lhs(const ZhongContext& ctx, double r, double theta);

struct AngleSolution {
  double theta = 0.0;
  double residual = 0.0;  // Phi_r(theta) - 1/t (0 on the u = 0 branch)
  double f = 0.0;         // f(r)
  int evaluations = 0;
};

/// u_t(r) with diagnostics; theta = 0 iff f(r) <= 1/t. An optional bracket
/// guess is tried (and widened) before the full interval (0, pi).
AngleSolution solve_angle(const ZhongContext& ctx, double r,
                          std::optional<std::pair<double, double>> guess = std::nullopt);
double u_t(const ZhongContext& ctx, double r);

struct VInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_clipped = false;  // true when the window, not f = 1/t, ends the interval
  bool hi_clipped = false;
};

struct VSet {
  std::vector<VInterval> intervals;
  Interval window;
};

/// [1e-4 / ess sup, 1e4 / ess inf]; for unbounded support the 1e-7 quantiles
/// are used with a margin exp(t/2 + 3 sqrt(t) + 1).
Interval default_window(const ZhongContext& ctx);

/// Maximal open intervals of {r : f(r) > 1/t} inside the window. Throws
/// EmptyVSet if there are none.
VSet v_set(const ZhongContext& ctx, std::optional<Interval> window = std::nullopt);

double lambda_map(const ZhongContext& ctx, double r);
/// r with |Lambda(r) - y| / y <= tol_root; bracket grown by factors of 2 from r = y.
double lambda_inverse(const ZhongContext& ctx, double y);
/// q_t(x); exactly 0 where u_t vanishes.
double density(const ZhongContext& ctx, double x);

struct SupportSet {
  std::vector<Interval> intervals;
};

struct CurveSpec {
  int points = 2048;
  std::optional<Interval> window;  // r-window for the V-set search
};

struct CurveMetadata {
  double t = 0.0;
  std::string measure;
  int points = 0;
  Interval window;
  Tolerances tol;
  bool lambda_monotone = true;
  std::vector<std::string> merges;
  std::vector<std::string> warnings;
};

struct DensityCurve {
  std::vector<double> x;
  std::vector<double> q;
  SupportSet support;
  /// Per support component: true where the end comes from the search window.
  std::vector<std::pair<bool, bool>> soft_ends;
  CurveMetadata meta;

  [[nodiscard]] double integral() const;  // trapezoid
  [[nodiscard]] double mean() const;      // trapezoid of x q
};

/// Support of sigma_t [x] nu from the V-set: closure of {x : 1/x in Lambda(V)}.
SupportSet support_set(const ZhongContext& ctx, const VSet& v);

DensityCurve density_curve(const ZhongContext& ctx, const CurveSpec& spec = {});

}  // namespace freemult
