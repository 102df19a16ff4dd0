// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "freemult/criteria.hpp"
#include "freemult/errors.hpp"
#include "freemult/unimodality.hpp"
#include "freemult/zhong.hpp"

using namespace freemult;
using std::numbers::pi;

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) {
    if (pass) detail += (detail.empty() ? "" : "; ") + s;
  }
};

double log_interp_xq(const DensityCurve& c, double x) {
  if (x < c.x.front() || x > c.x.back()) return 0.0;
  const auto j = static_cast<std::size_t>(std::lower_bound(c.x.begin(), c.x.end(), x) - c.x.begin());
  if (j == 0) return c.x[0] * c.q[0];
  const double w = (std::log(x) - std::log(c.x[j - 1])) / (std::log(c.x[j]) - std::log(c.x[j - 1]));
  return (1.0 - w) * c.x[j - 1] * c.q[j - 1] + w * c.x[j] * c.q[j];
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

Outcome point_mass_pipeline() {
  Outcome o;
  double worst_mass = 0.0, worst_mean = 0.0, worst_sym = 0.0, worst_mode = 0.0;
  for (double t : {0.25, 1.0, 4.0}) {
    const auto c = density_curve(ZhongContext(Measure::dirac(1.0), t));
    const double mass = std::abs(c.integral() - 1.0);
    const double mean = std::abs(c.mean() - std::exp(t / 2)) / std::exp(t / 2);
    double sym = 0.0;
    for (std::size_t i = 0; i < c.x.size(); ++i) sym = std::max(sym, std::abs(c.x[i] * c.q[i] - log_interp_xq(c, 1.0 / c.x[i])));
    const auto m = is_log_unimodal(c);
    const std::string at = " at t = " + fmt("%g", t);
    o.require(mass <= 1e-4, "mass" + at);
    o.require(mean <= 1e-3, "mean" + at);
    o.require(sym <= 1e-3, "log symmetry" + at);
    o.require(m.verdict == Verdict::unimodal && m.modes.size() == 1, "unimodal" + at);
    if (!m.modes.empty()) {
      o.require(std::abs(m.modes[0] - 1.0) <= m.resolution, "mode at 1" + at);
      worst_mode = std::max(worst_mode, std::abs(m.modes[0] - 1.0) / m.resolution);
    }
    worst_mass = std::max(worst_mass, mass);
    worst_mean = std::max(worst_mean, mean);
    worst_sym = std::max(worst_sym, sym);
  }
  o.note(fmt("|mass-1| <= %.2e, mean rel err <= %.2e, asymmetry <= %.2e", worst_mass, worst_mean, worst_sym));
  o.note(fmt("mode offset <= %.2e grid steps", worst_mode));
  return o;
}

Outcome dilation_law() {
  Outcome o;
  const ZhongContext one(Measure::dirac(1.0), 1.0);
  const auto curve = density_curve(ZhongContext(Measure::dirac(2.0), 1.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    worst = std::max(worst, std::abs(curve.q[i] - 0.5 * density(one, curve.x[i] / 2.0)));
  }
  o.require(worst <= 1e-6, "sup-norm " + fmt("%.3e", worst));
  o.note(fmt("sup |q - q1(x/2)/2| = %.3e over %g nodes", worst, static_cast<double>(curve.x.size())));
  return o;
}

Outcome mode_table() {
  Outcome o;
  struct Row {
    const char* name;
    Measure nu;
    double mode;
  };
  const std::vector<Row> rows = {{"HalfNormal(4)", Measure::half_normal(4.0), 2.0},
                                 {"Gamma(2,1)", Measure::gamma(2.0, 1.0), 2.0},
                                 {"Beta(2,3)", Measure::beta(2.0, 3.0), 0.5},
                                 {"MarchenkoPastur", Measure::marchenko_pastur(), 2.0},
                                 {"MarchenkoPastur^-1", Measure::marchenko_pastur_inverse(), 0.5},
                                 {"BooleanStable(0.5)", Measure::boolean_stable(0.5), 1.0}};
  double worst = 0.0;
  for (const auto& r : rows) {
    const auto m = is_log_unimodal(r.nu);
    const bool ok = m.verdict == Verdict::unimodal && !m.modes.empty() && std::abs(m.modes[0] - r.mode) <= m.resolution;
    o.require(ok, r.name);
    if (!m.modes.empty()) worst = std::max(worst, std::abs(m.modes[0] - r.mode) / m.resolution);
  }
  o.note(fmt("6 families unimodal, worst offset %.2e grid steps", worst));
  return o;
}

Outcome lambda_half_pi() {
  Outcome o;
  for (double t : {0.25, 1.0, 4.0}) {
    const auto m = is_log_unimodal(density_curve(ZhongContext(Measure::lambda(pi / 2), t)));
    o.require(m.verdict == Verdict::unimodal, "t = " + fmt("%g", t) + " verdict " + std::string(to_string(m.verdict)));
    if (!m.modes.empty()) o.note(fmt("t = %g: mode %.6f", t, m.modes[0]));
  }
  return o;
}

Outcome uniform_sweep() {
  Outcome o;
  const double D = d_bound(1.0, 1.1);
  o.require(std::abs(D - 21.285774973453982) <= 1e-9 && std::round(D * 100) / 100 == 21.29, fmt("D = %.15g", D));
  const auto nu = Measure::uniform(1.0, 1.1);
  const auto gap = case2_gap_check(nu, 1.0, 1.1, 22.0);
  o.require(gap.holds, "case2 gap check");
  const auto sweep = theta_sweep(nu, 22.0);
  o.require(sweep.R.size() == 64 && sweep.max_count <= 2, fmt("max count %g", sweep.max_count));
  const auto m = is_log_unimodal(density_curve(ZhongContext(nu, 22.0)));
  o.require(m.verdict == Verdict::unimodal, "density verdict " + std::string(to_string(m.verdict)));
  o.note(fmt("D = %.6f, min gap margin %.3e, max count %g", D, gap.min_margin, sweep.max_count));
  return o;
}

Outcome counterexample() {
  Outcome o;
  const auto [nu, spec] = build_counterexample(30);
  const double limit = 315.0 / (2.0 * std::pow(pi, 4));
  o.require(spec.partial_sum_w_over_a < limit, fmt("partial sum %.10f vs %.10f", spec.partial_sum_w_over_a, limit));
  for (double t : {0.5, 1.0, 2.0}) {
    const std::string at = " at t = " + fmt("%g", t);
    const auto cert = first_gap_certificate(nu, t);
    o.require(cert && cert->below && cert->k <= 29 && cert->f_at_bk < 1.0 / t, "gap certificate" + at);
    const auto curve = density_curve(ZhongContext(nu, t));
    o.require(curve.support.intervals.size() >= 2, "support components" + at);
    o.require(is_log_unimodal(curve).verdict == Verdict::not_unimodal, "verdict" + at);
    if (cert) o.note(fmt("t = %g: k = %g, %g components", t, cert->k, static_cast<double>(curve.support.intervals.size())));
  }
  o.note(fmt("sum w/a = %.10f < 315/(2 pi^4) = %.10f", spec.partial_sum_w_over_a, limit));
  return o;
}

Outcome condition_equivalence() {
  Outcome o;
  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<Measure> fixtures = {Measure::uniform(1.0, 2.0), Measure::lambda(pi / 2), Measure::dirac(1.0),
                                         Measure::gamma(2.0, 1.0)};
  int agree = 0;
  for (int k = 0; k < 20; ++k) {
    const auto& nu = fixtures[k % fixtures.size()];
    const double t = std::exp(std::log(0.2) + std::log(100.0) * U(rng));
    const double R = 0.05 + (pi - 0.1) * U(rng);
    const auto c3 = count_theta_solutions(nu, R, t);
    const auto c2 = count_condition2_solutions(nu, R / (pi * t), t);
    const bool same = c2.count == c3.count && c2.count_with_multiplicity == c3.count_with_multiplicity;
    agree += same ? 1 : 0;
    o.require(same, nu.describe() + fmt(" t = %g R = %g", t, R));
  }
  double worst = 0.0;
  for (int k = 0; k < 40; ++k) {
    const auto& nu = fixtures[k % fixtures.size()];
    const double t = 0.1 + 10.0 * U(rng);
    const double B = 0.02 + (pi - 0.04) * U(rng);
    const double r = std::exp(4.0 * U(rng) - 2.0);
    const double want = theta_R(nu, B, r) * B / std::sin(B);
    worst = std::max(worst, std::abs(lemma41_condition2_lhs(nu, B / (pi * t), t, r) - want) / std::abs(want));
  }
  o.require(worst <= 1e-10, fmt("identity rel err %.3e", worst));
  o.note(fmt("%g/20 counts agree, identity rel err %.3e", agree, worst));
  return o;
}

Outcome strong_unimodality() {
  Outcome o;
  for (double b : {2.0, 2.5, 3.0}) {
    double gmax = -kInf;
    for (int i = 0; i < 10000; ++i) gmax = std::max(gmax, lambda_g_second(b, -20.0 + 40.0 * i / 9999.0));
    o.require(gmax <= 0.0, fmt("b = %g: max g'' = %.3e", b, gmax));
    o.require(lambda_strong_check(b).strongly_log_unimodal, fmt("b = %g verdict", b));
  }
  for (double b : {0.5, 1.0}) {
    const auto s = lambda_strong_check(b);
    o.require(!s.strongly_log_unimodal && s.witness && s.g_second(*s.witness) > 0.0, fmt("b = %g witness", b));
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, pi);
  int agree = 0;
  for (int k = 0; k < 100; ++k) {
    const double b = U(rng);
    if (b <= 0.0) continue;
    agree += lambda_strong_check(b).strongly_log_unimodal == (std::cos(b) <= 0.0) ? 1 : 0;
  }
  o.require(agree == 100, fmt("%g/100 sampled b agree", agree));
  o.note(fmt("g'' <= 0 on 1e4 points for b in {2, 2.5, 3}; witnesses for b in {0.5, 1}; %g/100 agree", agree));
  return o;
}

Outcome pick_checks() {
  Outcome o;
  const auto g = pick_inequality_check(Measure::gamma(2.0, 1.0), 2.0);
  o.require(g.holds, "Gamma(2,1) at c = 2");
  for (double c : {0.5, 1.0, 3.0}) o.require(pick_inequality_check(Measure::dirac(c), c).holds, fmt("Dirac(%g)", c));
  const auto two = Measure::atomic({{0.5, 1.0}, {0.5, 4.0}});
  int violated = 0;
  for (int k = 0; k < 20; ++k) {
    const double c = 0.5 + 4.5 * k / 19.0;
    violated += pick_inequality_check(two, c).holds ? 0 : 1;
  }
  o.require(violated == 20, fmt("two atoms violated for %g/20 c", violated));
  o.note(fmt("Gamma min Im %.3e, two atoms violated for %g/20 values of c in [0.5, 5]", g.extreme, violated));
  return o;
}

Outcome convolution_fixtures() {
  Outcome o;
  const std::pair<const char*, std::pair<Measure, Measure>> pairs[] = {
      {"Lambda(2)*Lambda(pi/2)", {Measure::lambda(2.0), Measure::lambda(pi / 2)}},
      {"LogNormal(0,1)*Lambda(1)", {Measure::log_normal(0.0, 1.0), Measure::lambda(1.0)}}};
  for (const auto& [name, ab] : pairs) {
    const auto conv = mult_convolve(ab.first, ab.second);
    o.require(is_mult_symmetric(conv, 1e-3), std::string(name) + " symmetry");
    o.require(is_log_unimodal(conv).verdict == Verdict::unimodal, std::string(name) + " unimodal");
  }
  const auto ln = mult_convolve(Measure::log_normal(0.0, 1.0), Measure::log_normal(0.0, 1.0));
  const auto ref = Measure::log_normal(0.0, std::sqrt(2.0));
  double err = 0.0;
  for (double x : log_spaced(std::exp(-8.0), std::exp(8.0), 2000)) err = std::max(err, std::abs(ln.density(x) - ref.density(x)));
  o.require(err <= 1e-3, fmt("log-normal sup err %.3e", err));
  o.note(fmt("two symmetric unimodal products; log-normal sup err %.3e", err));
  return o;
}

Outcome solver_contracts() {
  Outcome o;
  double worst_res = 0.0, worst_rt = 0.0;
  int positive = 0, pairs = 0;
  const std::vector<Measure> fixtures = {Measure::dirac(1.0), Measure::uniform(1.0, 2.0), Measure::gamma(2.0, 1.0),
                                         Measure::atomic({{0.5, 1.0}, {0.5, 4.0}}), Measure::lambda(pi / 2)};
  for (const auto& nu : fixtures) {
    for (double t : {0.25, 1.0, 4.0}) {
      const ZhongContext ctx(nu, t);
      const auto v = v_set(ctx);
      for (const auto& iv : v.intervals) {
        for (double r : log_spaced(iv.lo, iv.hi, 40)) {
          const auto s = solve_angle(ctx, r);
          if (s.theta <= 0.0) continue;
          ++positive;
          worst_res = std::max(worst_res, std::abs(s.residual) * t);
        }
      }
      for (double r : log_spaced(v.intervals.front().lo * 1e-2, v.intervals.back().hi * 1e2, 200)) {
        worst_rt = std::max(worst_rt, std::abs(lambda_inverse(ctx, lambda_map(ctx, r)) - r) / r);
      }
      for (double r : log_spaced(v.intervals.front().lo, v.intervals.back().hi, 20)) {
        double prev = kInf;
        for (int k = 1; k < 64; ++k) {
          const double phi = theta_equation_lhs(ctx, r, pi * k / 64.0);
          ++pairs;
          o.require(phi < prev, nu.describe() + fmt(" Phi not decreasing at r = %g, t = %g", r, t));
          prev = phi;
        }
      }
    }
  }
  o.require(worst_res <= 1e-10, fmt("t * residual %.3e", worst_res));
  o.require(worst_rt <= 1e-8, fmt("round trip %.3e", worst_rt));
  o.note(fmt("max t*|residual| %.2e over %g points; round trip %.2e", worst_res, positive, worst_rt));
  o.note(fmt("Phi decreasing on %g pairs", pairs));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"point-mass pipeline (mass, mean, symmetry, mode)", point_mass_pipeline},
      {"dilation law", dilation_law},
      {"mode table of the named families", mode_table},
      {"Lambda(pi/2) stays log-unimodal", lambda_half_pi},
      {"Uniform(1,1.1) at t = 22: D, gap check, R sweep, verdict", uniform_sweep},
      {"atomic counterexample: certificates, support, verdict, series", counterexample},
      {"Theta_R criterion: kernel-integral and Theta_R forms agree", condition_equivalence},
      {"strong log-unimodality of lambda_b", strong_unimodality},
      {"Pick checks", pick_checks},
      {"multiplicative convolution fixtures", convolution_fixtures},
      {"solver contracts", solver_contracts},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2d. %s -- %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
