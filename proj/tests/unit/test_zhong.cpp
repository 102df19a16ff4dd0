#include <doctest.h>

#include <cmath>
#include <numbers>

#include "freemult/errors.hpp"
#include "freemult/zhong.hpp"

using namespace freemult;
using std::numbers::pi;

TEST_CASE("angle equation for a point mass") {
  const ZhongContext ctx(Measure::dirac(1.0), 4.0);
  for (double th : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const double s = std::sin(th / 2);
    CHECK(theta_equation_lhs(ctx, 1.0, th) == doctest::Approx(std::sin(th) / (4 * th * s * s)).epsilon(1e-14));
  }
  // 1/theta^2 blow-up
  CHECK(theta_equation_lhs(ctx, 1.0, 1e-4) * 1e-8 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(theta_equation_lhs(ctx, 1.0, pi - 1e-9) < 1e-8);
}

TEST_CASE("u_t for a point mass") {
  CHECK(u_t(ZhongContext(Measure::dirac(1.0), 4.0), 1.0) == doctest::Approx(1.7206671780387595).epsilon(1e-12));
  CHECK(u_t(ZhongContext(Measure::dirac(1.0), 0.1), 0.5) == 0.0);
  const ZhongContext two(Measure::atomic({{0.5, 1.0}, {0.5, 4.0}}), 0.01);
  CHECK(u_t(two, 1.0) > 0.0);
  CHECK(u_t(two, 0.25) > 0.0);
}

TEST_CASE("V-set of a point mass") {
  const auto v = v_set(ZhongContext(Measure::dirac(1.0), 0.1));
  REQUIRE(v.intervals.size() == 1);
  CHECK(v.intervals[0].lo == doctest::Approx((21.0 - std::sqrt(41.0)) / 20.0).epsilon(1e-13));
  CHECK(v.intervals[0].hi == doctest::Approx((21.0 + std::sqrt(41.0)) / 20.0).epsilon(1e-13));
  CHECK_FALSE(v.intervals[0].lo_clipped);
  struct Row { double t, vlo, vhi, slo, shi; };
  for (const Row& row : {Row{0.25, 0.6096117967977911, 1.640388203202208, 0.36410203805691577, 2.7464828412844033},
                         Row{1.0, 0.3819660112501143, 2.6180339887498953, 0.12487305235783527, 8.008132908726829},
                         Row{4.0, 0.1715728752538099, 5.828427124746158, 0.010140942881657955, 98.6101599890406}}) {
    const ZhongContext ctx(Measure::dirac(1.0), row.t);
    const auto vs = v_set(ctx);
    REQUIRE(vs.intervals.size() == 1);
    CHECK(vs.intervals[0].lo == doctest::Approx(row.vlo).epsilon(1e-12));
    CHECK(vs.intervals[0].hi == doctest::Approx(row.vhi).epsilon(1e-12));
    const auto s = support_set(ctx, vs);
    REQUIRE(s.intervals.size() == 1);
    CHECK(s.intervals[0].lo == doctest::Approx(row.slo).epsilon(1e-9));
    CHECK(s.intervals[0].hi == doctest::Approx(row.shi).epsilon(1e-9));
  }
}

TEST_CASE("Lambda for a point mass") {
  const ZhongContext ctx(Measure::dirac(1.0), 0.1);
  CHECK(lambda_map(ctx, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambda_map(ctx, 0.73) == doctest::Approx(0.5301212969184637).epsilon(1e-12));
  CHECK(lambda_inverse(ctx, 0.5297) == doctest::Approx(0.7219769828631185).epsilon(1e-9));
  CHECK(lambda_inverse(ZhongContext(Measure::dirac(1.0), 4.0), 1.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("density of a point mass") {
  const ZhongContext ctx(Measure::dirac(1.0), 4.0);
  CHECK(density(ctx, 1.0) == doctest::Approx(0.13692634340042545).epsilon(1e-10));
  CHECK(density(ZhongContext(Measure::dirac(1.0), 0.1), 100.0) == 0.0);
}

TEST_CASE("density curve of a point mass") {
  for (double t : {0.25, 1.0, 4.0}) {
    const auto c = density_curve(ZhongContext(Measure::dirac(1.0), t));
    CAPTURE(t);
    CHECK(c.support.intervals.size() == 1);
    CHECK(c.integral() == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(c.mean() == doctest::Approx(std::exp(t / 2)).epsilon(1e-3));
  }
}

namespace {

struct Case {
  const char* name;
  Measure nu;
  double t;
};

std::vector<Case> solver_cases() {
  std::vector<Case> out;
  for (double t : {0.25, 1.0, 4.0}) {
    out.push_back({"dirac", Measure::dirac(1.0), t});
    out.push_back({"uniform", Measure::uniform(1.0, 2.0), t});
    out.push_back({"gamma", Measure::gamma(2.0, 1.0), t});
    out.push_back({"two atoms", Measure::atomic({{0.5, 1.0}, {0.5, 4.0}}), t});
    out.push_back({"lambda", Measure::lambda(pi / 2), t});
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("angle residual is within tol_root / t wherever u_t > 0") {
  for (const auto& c : solver_cases()) {
    CAPTURE(c.name);
    CAPTURE(c.t);
    const ZhongContext ctx(c.nu, c.t);
    const auto v = v_set(ctx);
    int positive = 0;
    for (const auto& iv : v.intervals) {
      for (double r : log_spaced(iv.lo, iv.hi, 42)) {
        const auto s = solve_angle(ctx, r);
        if (s.theta <= 0.0) continue;
        ++positive;
        CHECK(std::abs(s.residual) <= 1e-10 / c.t);
      }
    }
    CHECK(positive > 0);
  }
}

TEST_CASE("Lambda round trip on 200 log-spaced points") {
  for (const auto& c : solver_cases()) {
    CAPTURE(c.name);
    CAPTURE(c.t);
    const ZhongContext ctx(c.nu, c.t);
    const auto v = v_set(ctx);
    const double lo = v.intervals.front().lo;
    const double hi = v.intervals.back().hi;
    double worst = 0.0;
    for (double r : log_spaced(lo * 1e-2, hi * 1e2, 200)) {
      worst = std::max(worst, std::abs(lambda_inverse(ctx, lambda_map(ctx, r)) - r) / r);
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("Phi_r is strictly decreasing in theta") {
  for (const auto& c : solver_cases()) {
    CAPTURE(c.name);
    CAPTURE(c.t);
    const ZhongContext ctx(c.nu, c.t);
    const auto v = v_set(ctx);
    for (double r : log_spaced(v.intervals.front().lo, v.intervals.back().hi, 25)) {
      double prev = kInf;
      for (int k = 1; k < 64; ++k) {
        const double phi = theta_equation_lhs(ctx, r, pi * k / 64.0);
        CHECK(phi < prev);
        prev = phi;
      }
    }
  }
}

TEST_CASE("dilating the measure dilates the density") {
  const ZhongContext one(Measure::dirac(1.0), 1.0);
  const ZhongContext two(Measure::dirac(2.0), 1.0);
  const auto curve = density_curve(two, {.points = 1024});
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    worst = std::max(worst, std::abs(curve.q[i] - 0.5 * density(one, curve.x[i] / 2.0)));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("inverse moment of Uniform(1,2) is log 2") {
  CHECK(integrate(Measure::uniform(1.0, 2.0), [](double x) { return 1.0 / x; }) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Lambda log pushforward is even") {
  for (double b : {0.5, pi / 2, 2.5}) {
    const auto ld = pushforward_log(Measure::lambda(b), RealGrid{-8.0, 8.0, 801});
    for (std::size_t i = 0; i < ld.y.size(); ++i) {
      CHECK(ld.p[i] == doctest::Approx(ld.p[ld.y.size() - 1 - i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("inversion is an involution") {
  const auto atoms = Measure::atomic({{0.2, 0.5}, {0.3, 2.0}, {0.5, 7.0}});
  const auto back = invert_measure(invert_measure(atoms));
  REQUIRE(back.atoms().size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.atoms()[i].location == doctest::Approx(atoms.atoms()[i].location).epsilon(1e-15));
    CHECK(back.atoms()[i].weight == atoms.atoms()[i].weight);
  }
  const auto mp = Measure::marchenko_pastur();
  CHECK(invert_measure(invert_measure(mp)).describe() == mp.describe());
  const auto g = Measure::gamma(3.0, 1.0);
  const auto gg = invert_measure(invert_measure(g));
  for (double x : {1.0, 3.0, 6.0}) CHECK(gg.cdf(x) == doctest::Approx(g.cdf(x)).epsilon(1e-3));
}
