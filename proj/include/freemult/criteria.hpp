#pragma once

// Solution-count criterion for log-unimodality of sigma_t [x] nu,
//   Theta_R(r) = (sin R / R) int r xi / (1 + r^2 xi^2 - 2 r xi cos R) d nu(xi) = 1/t,
// the D_{alpha,beta} time bound, classical multiplicative convolution and
// the atomic counterexample family with its disconnected-V certificate.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freemult/measures.hpp"

namespace freemult {

double theta_R(const Measure& nu, double R, double r, const Tolerances& tol = {});

struct SolutionCount {
  int count = 0;                    // distinct solutions
  int count_with_multiplicity = 0;  // tangencies counted twice
  std::vector<double> locations;
  std::vector<bool> tangency;
  bool boundary = false;  // some solution is a tangency within tolerance
};

inline constexpr int kSolutionGridPoints = 4096;

/// Solutions of F(r) = level on a log grid over the window; sign changes are
/// polished with toms748 and discrete extrema with Brent (double roots within
/// tol_root * |level| count as tangencies). Throws WindowTooNarrow when
/// F >= level at a window end.
SolutionCount count_solutions(const std::function<double(double)>& F, double level, Interval window,
                              int grid = kSolutionGridPoints, const Tolerances& tol = {});

/// r-window [1e-4 / ess sup, 1e4 / ess inf] (quantile-based when unbounded).
Interval theta_window(const Measure& nu, double t);

SolutionCount count_theta_solutions(const Measure& nu, double R, double t, std::optional<Interval> window = std::nullopt,
                                    int grid = kSolutionGridPoints, const Tolerances& tol = {});

/// 64 values in (0.01, pi - 0.01), clustered toward both ends.
std::vector<double> default_R_sweep(int count = 64);

struct CriterionReport {
  double t = 0.0;
  std::vector<double> R;
  std::vector<SolutionCount> counts;
  int max_count = 0;     // with multiplicity
  bool verdict = true;   // every count <= 2
};

CriterionReport theta_sweep(const Measure& nu, double t, const std::vector<double>& R = default_R_sweep(),
                            std::optional<Interval> window = std::nullopt, int grid = kSolutionGridPoints,
                            const Tolerances& tol = {});

/// D_{alpha,beta}; +inf at alpha = beta where the radicand vanishes.
/// HypothesisViolated unless 0 < alpha <= beta and beta^4 - 3 alpha^4 < 2 alpha^3 beta.
double d_bound(double alpha, double beta);

struct GapCheck {
  bool holds = true;
  double min_margin = 0.0;  // min of Theta_R(r) - 1/t over the sample grid
  double cos_threshold = 0.0;
  int samples = 0;
};

/// Theta_R(r) > 1/t for R with cos R > (3 alpha^4 - beta^4) / (2 alpha^3 beta)
/// and r in [1/beta, 1/alpha], sampled on a samples x samples grid.
GapCheck case2_gap_check(const Measure& nu, double alpha, double beta, double t, int samples = 64,
                         const Tolerances& tol = {});

struct ConvolutionSpec {
  int points = 4096;  // output log-grid size (and cells of the discretized factor)
};

/// Law of XY for independent X ~ mu, Y ~ nu. Atomic x atomic stays atomic;
/// otherwise the narrower factor (in log scale) is split into exact-mass cells
/// and mixed over dilations of the other. GridUnderflow when the output grid
/// cannot resolve the narrower factor.
Measure mult_convolve(const Measure& mu, const Measure& nu, const ConvolutionSpec& spec = {});

/// Density at r of lambda_B [*] nu^{-1}: int c_B xi / (1 - 2 r xi cos B + r^2 xi^2) d nu.
double lambda_convolution_density(const Measure& nu, double B, double r, const Tolerances& tol = {});
/// (r / c_B) times the density above, B = a pi t.
double lemma41_condition2_lhs(const Measure& nu, double a, double t, double r, const Tolerances& tol = {});
/// Solutions of lemma41_condition2_lhs(r) = a pi / sin(a pi t).
SolutionCount count_condition2_solutions(const Measure& nu, double a, double t,
                                         std::optional<Interval> window = std::nullopt,
                                         int grid = kSolutionGridPoints, const Tolerances& tol = {});

struct CounterexampleRules {
  std::string name;
  std::function<double(int)> weight;    // w_n, n >= 1
  std::function<double(int)> location;  // a_n, strictly decreasing
};

/// w_n = 945 / (pi^6 n^6), a_n = n^-4.
CounterexampleRules example48_rules();

struct CounterexampleSpec {
  std::string family;
  int N = 0;
  bool inverted = false;
  std::vector<double> raw_weights;
  std::vector<double> weights;  // renormalized
  std::vector<double> locations;
  double raw_mass = 0.0;
  double remainder_mass = 0.0;  // 1 - raw_mass, folded into the renormalization
  bool decreasing = true;
  std::vector<double> ratios;  // a_k a_{k+1} (a_k + a_{k+1}) / (a_k - a_{k+1})^2, k = 1..N-1
  bool ratios_decreasing = true;
  double partial_sum_w_over_a = 0.0;  // with raw weights
  std::vector<double> midpoints;      // b_k = (1/a_{k+1} + 1/a_k) / 2
};

/// Truncated atomic measure sum_{n <= N} w_n delta_{a_n} (renormalized);
/// inverted = true returns the image under x -> 1/x.
std::pair<Measure, CounterexampleSpec> build_counterexample(int N, const CounterexampleRules& rules = example48_rules(),
                                                            bool inverted = false);

struct GapCertificate {
  int k = 0;
  double b_k = 0.0;
  double f_at_bk = 0.0;
  bool below = false;  // f(b_k) < 1/t: V excludes b_k but contains 1/a_k and 1/a_{k+1}
};

/// Atoms are indexed by decreasing location, k >= 1. IndexOutOfRange unless k + 1 <= #atoms.
GapCertificate gap_certificate(const Measure& nu, double t, int k, const Tolerances& tol = {});
/// Smallest k with a certificate, if any.
std::optional<GapCertificate> first_gap_certificate(const Measure& nu, double t, const Tolerances& tol = {});

}  // namespace freemult
