#pragma once

// Unimodality verdicts: hysteretic mode counting on sampled curves, the
// x d mu route to log-unimodality, Pick-type inequalities on half-plane
// grids and the log-concavity test for the lambda_b family.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freemult/analytic.hpp"
#include "freemult/zhong.hpp"

namespace freemult {

enum class Verdict { unimodal, not_unimodal, inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct ModeReport {
  Verdict verdict = Verdict::inconclusive;
  int num_local_maxima = 0;
  std::vector<double> modes;     // sorted
  int max_level_crossings = 0;   // up + down crossings of the worst level
  double resolution = 0.0;       // grid spacing at the (first) mode
  double tolerance = 0.0;        // absolute hysteresis used
  std::string note;
};

inline constexpr double kDefaultHysteresis = 1e-4;
inline constexpr int kLevelCount = 50;

/// Strict local maxima of v after suppressing oscillations below
/// eps_rel * max(v), plus a sweep of 50 levels counting connected
/// super-level components. Needs >= 64 increasing abscissae.
ModeReport count_modes(std::span<const double> x, std::span<const double> v, double eps_rel = kDefaultHysteresis);

/// Mode counting of x f(x) on a log grid (modes reported in x). Named
/// families and grids are resampled around each mode for sub-grid accuracy.
ModeReport is_log_unimodal(const Measure& nu, double eps_rel = kDefaultHysteresis, int points = 4096);
/// Same on a sampled density curve; a disconnected support is reported as
/// not unimodal.
ModeReport is_log_unimodal(const DensityCurve& curve, double eps_rel = kDefaultHysteresis);

struct PickViolation {
  cplx z;
  double value;
};

struct PickReport {
  bool holds = true;
  std::vector<PickViolation> violations;
  double extreme = 0.0;    // min (or max) of the tested imaginary part
  double scale = 0.0;      // grid max of the modulus, used to scale tol_pick
  double tolerance = 0.0;  // absolute threshold tol_pick * scale
  std::string evidence;    // "certificate" when violated, "supporting" otherwise
};

/// Im[z (1 - c z) psi'(z)] >= -tol_pick * scale on the grid.
PickReport pick_inequality_check(const Measure& mu, double c, const HalfPlaneGrid& grid = {},
                                 const Tolerances& tol = {});
/// Im[(z - c) P'(z)] <= tol_pick * scale on the grid.
PickReport general_pick_check(const RealLineMeasure& tau, double c, const HalfPlaneGrid& grid = {},
                              const Tolerances& tol = {});

/// Second derivative of log of the log-pushforward of lambda_b, as printed:
/// 2e^x (cos b - 2e^x + e^{2x} cos b) / (1 - 2e^x cos b + e^{2x})^2.
double lambda_g_second_printed(double b, double x);
/// The same quantity as (cos b cosh x - 1) / (cosh x - cos b)^2.
double lambda_g_second(double b, double x);

struct StrongCheck {
  bool strongly_log_unimodal = false;
  std::function<double(double)> g_second;
  std::optional<double> witness;  // x with g''(x) > 0 when cos b > 0
  double cos_b = 0.0;
};

/// cos b <= 0 (cos b within 1e-15 of 0 counts as 0).
StrongCheck lambda_strong_check(double b);

}  // namespace freemult
