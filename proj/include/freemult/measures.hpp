#pragma once

// Probability measures on (0, inf): finite atomic lists, gridded densities
// and closed-form named families, with the kernel integrals built on them.

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "freemult/tolerances.hpp"

namespace freemult {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
  [[nodiscard]] bool interior(double x) const { return x > lo && x < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Atom {
  double weight = 0.0;
  double location = 0.0;
  friend bool operator==(const Atom&, const Atom&) = default;
};

namespace family {
struct Dirac { double c = 1.0; };
/// c_b / (1 - 2x cos b + x^2), c_b = sin b / (pi - b)
struct Lambda { double b = 1.0; };
/// law of |X|, X ~ N(0, t)
struct HalfNormal { double t = 1.0; };
struct Gamma { double p = 1.0; double theta = 1.0; };
struct Beta { double p = 1.0; double q = 1.0; };
/// (1/2pi) sqrt((4-x)/x) on (0, 4]
struct MarchenkoPastur {};
/// law of 1/X for X Marchenko-Pastur
struct MarchenkoPasturInverse {};
/// positive Boolean stable law of index alpha
struct BooleanStable { double alpha = 0.5; };
struct UniformInterval { double lo = 1.0; double hi = 2.0; };
struct LogNormal { double m = 0.0; double s = 1.0; };
}  // namespace family

using NamedFamily = std::variant<family::Dirac, family::Lambda, family::HalfNormal, family::Gamma, family::Beta,
                                 family::MarchenkoPastur, family::MarchenkoPasturInverse, family::BooleanStable,
                                 family::UniformInterval, family::LogNormal>;

/// Canonical family identifier as used in scenario files ("gamma", "lambda", ...).
std::string family_name(const NamedFamily& f);

enum class MeasureKind { atomic, grid, named };

/// A validated probability measure on (0, inf). Immutable; cheap to copy.
class Measure {
 public:
  static Measure atomic(std::vector<Atom> atoms, double tol_mass = Tolerances{}.tol_mass);
  /// Piecewise-linear density through (x_i, f_i), zero outside [x_1, x_m].
  static Measure grid(std::vector<double> x, std::vector<double> f, double tol_mass = Tolerances{}.tol_mass);
  /// Same as grid() but rescales f so that the trapezoid mass is exactly 1.
  static Measure grid_normalized(std::vector<double> x, std::vector<double> f);
  static Measure named(const NamedFamily& fam);

  static Measure dirac(double c) { return named(family::Dirac{c}); }
  static Measure lambda(double b) { return named(family::Lambda{b}); }
  static Measure half_normal(double t) { return named(family::HalfNormal{t}); }
  static Measure gamma(double p, double theta) { return named(family::Gamma{p, theta}); }
  static Measure beta(double p, double q) { return named(family::Beta{p, q}); }
  static Measure marchenko_pastur() { return named(family::MarchenkoPastur{}); }
  static Measure marchenko_pastur_inverse() { return named(family::MarchenkoPasturInverse{}); }
  static Measure boolean_stable(double alpha) { return named(family::BooleanStable{alpha}); }
  static Measure uniform(double lo, double hi) { return named(family::UniformInterval{lo, hi}); }
  static Measure log_normal(double m, double s) { return named(family::LogNormal{m, s}); }

  [[nodiscard]] MeasureKind kind() const;
  /// False for atomic lists and for the Dirac family.
  [[nodiscard]] bool has_density() const { return atoms_.empty(); }
  [[nodiscard]] std::span<const Atom> atoms() const { return atoms_; }
  [[nodiscard]] std::span<const double> grid_x() const { return grid_x_; }
  [[nodiscard]] std::span<const double> grid_f() const { return grid_f_; }
  [[nodiscard]] const NamedFamily* family() const;
  [[nodiscard]] std::string describe() const;

  /// Lebesgue density; throws AtomicHasNoDensity for atomic measures.
  [[nodiscard]] double density(double x) const;
  [[nodiscard]] double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation where the family allows.
  [[nodiscard]] double sf(double x) const;
  [[nodiscard]] double quantile(double p) const;
  /// Closed hull of the support (hi may be +inf).
  [[nodiscard]] Interval support() const { return support_; }
  /// Open intervals on which the density is positive (empty for atoms).
  [[nodiscard]] std::span<const Interval> positive_runs() const { return runs_; }
  /// Integration range in y = log x after dropping tail mass tol_tail.
  [[nodiscard]] Interval log_domain() const { return log_domain_; }
  /// Points in y = log x where the density is not smooth (inside log_domain).
  [[nodiscard]] std::span<const double> log_kinks() const { return log_kinks_; }

  /// True if the density is positive on an open neighbourhood of x.
  [[nodiscard]] bool density_positive_near(double x) const;

 private:
  Measure() = default;
  void finish_density_setup();

  std::variant<std::monostate, NamedFamily> named_;
  std::vector<Atom> atoms_;
  std::vector<double> grid_x_, grid_f_, grid_cdf_;
  Interval support_;
  std::vector<Interval> runs_;
  Interval log_domain_;
  std::vector<double> log_kinks_;
  bool is_grid_ = false;
};

/// Kernel singularity hint for the quadrature: a pole or Lorentzian peak in
/// xi of the given half-width (0 for a pole on the real axis).
struct KernelFeature {
  double center = 0.0;
  double half_width = 0.0;
};

/// density_at(nu, x): Lebesgue density at x, 0 off the support.
double density_at(const Measure& nu, double x);

/// Integral of kernel(xi) d nu(xi). Exact weighted sum for atoms, adaptive
/// Gauss-Kronrod in log xi for densities. Throws NonIntegrable on failure.
double integrate(const Measure& nu, const std::function<double(double)>& kernel,
                 const Tolerances& tol = {}, std::span<const KernelFeature> features = {});
std::complex<double> integrate_complex(const Measure& nu,
                                       const std::function<std::complex<double>(double)>& kernel,
                                       const Tolerances& tol = {},
                                       std::span<const KernelFeature> features = {});

/// Numerator of the Poisson-type kernel, called as h(s, s - 1) with s = r xi;
/// the second argument is computed without cancellation.
using PoissonNumerator = std::function<double(double, double)>;

/// Integral of h(r xi) / ((r xi - cos theta)^2 + sin^2 theta) d nu(xi),
/// theta in [0, pi). The denominator equals |1 - r xi e^{i theta}|^2. Returns
/// +inf when theta = 0 and the pole 1/r carries mass or positive density.
double poisson_integral(const Measure& nu, double r, double theta, const PoissonNumerator& h,
                        const Tolerances& tol = {});

/// The law of 1/X.
Measure invert_measure(const Measure& nu);

struct RealGrid {
  double lo = -10.0;
  double hi = 10.0;
  int points = 2048;
};

/// Density of log X sampled at evenly spaced y.
struct LogDensity {
  std::vector<double> y;
  std::vector<double> p;
};

/// y -> f(e^y) e^y on the requested grid.
LogDensity pushforward_log(const Measure& nu, const RealGrid& grid);

/// sup |F_nu - F_{nu^-1}| <= tol on a log-symmetric grid (exact match for atoms).
bool is_mult_symmetric(const Measure& nu, double tol);

/// f(r) = int r xi / (1 - r xi)^2 d nu(xi); +inf at reciprocal atoms and where
/// the integral diverges.
double f_blowup(const Measure& nu, double r, const Tolerances& tol = {});

/// Canonical log-spaced grid used when a named family has to be tabulated.
inline constexpr int kCanonicalGridPoints = 2048;
/// Tabulate any density measure on a log grid (GridDensity, renormalized).
Measure to_grid(const Measure& nu, int points = kCanonicalGridPoints);

}  // namespace freemult
