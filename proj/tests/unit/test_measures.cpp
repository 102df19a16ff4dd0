#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "freemult/errors.hpp"
#include "freemult/measures.hpp"
#include "freemult/quadrature.hpp"

using namespace freemult;
using std::numbers::pi;

namespace {

std::vector<Measure> density_families() {
  return {Measure::lambda(pi / 2), Measure::lambda(0.4), Measure::half_normal(4.0), Measure::gamma(2.0, 1.0),
          Measure::beta(2.0, 3.0), Measure::beta(0.5, 0.7), Measure::marchenko_pastur(),
          Measure::marchenko_pastur_inverse(), Measure::boolean_stable(0.5), Measure::boolean_stable(0.3),
          Measure::uniform(0.5, 2.0), Measure::log_normal(0.3, 0.8)};
}

double expect_throw_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return static_cast<double>(e.code());
  }
  return -1.0;
}

}  // namespace

TEST_CASE("gauss-kronrod is exact on low degree polynomials") {
  auto p = [](double x) { return 3.0 * std::pow(x, 20) - x * x + 1.0; };
  const auto r = quad::integrate(p, -1.0, 2.0);
  const double exact = 3.0 * (std::pow(2.0, 21) + 1.0) / 21.0 - (8.0 + 1.0) / 3.0 + 3.0;
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("gauss-kronrod resolves an integrable endpoint singularity") {
  const double b[] = {0.0, 1.0};
  const auto r = quad::integrate([](double x) { return 1.0 / std::sqrt(x); }, std::span<const double>(b));
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("lambda density values") {
  const auto nu = Measure::lambda(pi / 2);
  CHECK(density_at(nu, 1.0) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  CHECK(density_at(nu, 1e-12) == doctest::Approx(2.0 / pi).epsilon(1e-10));
  CHECK(density_at(nu, -1.0) == 0.0);
}

TEST_CASE("atomic measures have no density") {
  const auto nu = Measure::atomic({{0.5, 1.0}, {0.5, 4.0}});
  CHECK(expect_throw_code([&] { (void)density_at(nu, 1.0); }) == static_cast<double>(ErrorCode::AtomicHasNoDensity));
  CHECK(expect_throw_code([&] { (void)density_at(Measure::dirac(1.0), 1.0); }) ==
        static_cast<double>(ErrorCode::AtomicHasNoDensity));
}

TEST_CASE("invalid inputs are rejected") {
  const auto code = static_cast<double>(ErrorCode::InvariantViolation);
  CHECK(expect_throw_code([] { Measure::atomic({{0.5, 1.0}, {0.4, 2.0}}); }) == code);
  CHECK(expect_throw_code([] { Measure::atomic({{0.5, 2.0}, {0.5, 1.0}}); }) == code);
  CHECK(expect_throw_code([] { Measure::atomic({{1.0, -1.0}}); }) == code);
  CHECK(expect_throw_code([] { Measure::grid({1.0, 2.0}, {1.0, 0.5}); }) == code);
  CHECK(expect_throw_code([] { Measure::grid({2.0, 1.0}, {1.0, 1.0}); }) == code);
  CHECK(expect_throw_code([] { Measure::lambda(pi); }) == code);
  CHECK(expect_throw_code([] { Measure::boolean_stable(1.0); }) == code);
  CHECK(expect_throw_code([] { Measure::uniform(2.0, 1.0); }) == code);
}

TEST_CASE("every family integrates to one") {
  for (const auto& nu : density_families()) {
    CAPTURE(nu.describe());
    CHECK(integrate(nu, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("cdf, sf and quantile agree") {
  for (const auto& nu : density_families()) {
    CAPTURE(nu.describe());
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
      const double x = nu.quantile(p);
      CHECK(nu.cdf(x) == doctest::Approx(p).epsilon(1e-9));
      CHECK(nu.cdf(x) + nu.sf(x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("cdf matches the integrated density") {
  for (const auto& nu : density_families()) {
    CAPTURE(nu.describe());
    const double x = nu.quantile(0.4);
    const double c = integrate(nu, [x](double xi) { return xi <= x ? 1.0 : 0.0; }, {},
                               std::vector<KernelFeature>{{x, 0.0}});
    CHECK(c == doctest::Approx(nu.cdf(x)).epsilon(1e-8));
  }
}

TEST_CASE("known first moments") {
  auto mean = [](const Measure& nu) { return integrate(nu, [](double x) { return x; }); };
  CHECK(mean(Measure::gamma(2.0, 1.5)) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(mean(Measure::beta(2.0, 3.0)) == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(mean(Measure::marchenko_pastur()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(mean(Measure::half_normal(4.0)) == doctest::Approx(std::sqrt(8.0 / pi)).epsilon(1e-10));
  CHECK(mean(Measure::log_normal(0.3, 0.8)) == doctest::Approx(std::exp(0.3 + 0.32)).epsilon(1e-9));
  CHECK(mean(Measure::uniform(0.5, 2.0)) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("f_blowup for a point mass") {
  const auto nu = Measure::dirac(1.0);
  for (double r : {0.1, 0.5, 0.9, 1.3, 7.0}) {
    CHECK(f_blowup(nu, r) == doctest::Approx(r / ((1.0 - r) * (1.0 - r))).epsilon(1e-14));
  }
  CHECK(std::isinf(f_blowup(nu, 1.0)));
}

TEST_CASE("f_blowup diverges inside the support and is finite outside") {
  const auto nu = Measure::uniform(1.0, 2.0);
  CHECK(std::isinf(f_blowup(nu, 1.0 / 1.5)));
  CHECK(std::isinf(f_blowup(nu, 1.0)));  // jump at the end point
  // closed form outside the support: int_1^2 r x / (1 - r x)^2 dx
  const double r = 0.3;
  auto anti = [r](double x) { return (std::log(std::abs(1.0 - r * x)) + 1.0 / (1.0 - r * x)) / r; };
  CHECK(f_blowup(nu, r) == doctest::Approx(anti(2.0) - anti(1.0)).epsilon(1e-11));
  // square-root edge: the integral stays finite at the hard edge of MP
  CHECK(std::isfinite(f_blowup(Measure::marchenko_pastur(), 0.2)));
  CHECK(std::isinf(f_blowup(Measure::marchenko_pastur(), 0.5)));
}

TEST_CASE("poisson integral against the uniform closed form") {
  const auto nu = Measure::uniform(0.5, 2.0);
  for (double r : {0.3, 1.0, 2.5}) {
    for (double theta : {1e-6, 1e-3, 0.05, 0.7, 2.0, 3.1}) {
      CAPTURE(r);
      CAPTURE(theta);
      const double c = std::cos(theta), s = std::sin(theta);
      // atan difference folded to avoid cancellation when s is tiny
      const double u1 = r * 0.5 - c, u2 = r * 2.0 - c;
      const double logs = 0.5 * std::log((u2 * u2 + s * s) / (u1 * u1 + s * s));
      const double den = s * s + u1 * u2;
      double dat = std::atan2(s * (u2 - u1), den);
      const double exact = (logs + c / s * dat) / (r * 1.5);
      const double got = poisson_integral(nu, r, theta, [](double v, double) { return v; });
      CHECK(got == doctest::Approx(exact).epsilon(1e-10));
    }
  }
}

TEST_CASE("poisson integral on a grid density uses the exact kernel") {
  const auto nu = to_grid(Measure::gamma(2.0, 1.0), 512);
  const double r = 0.8, theta = 2e-4;
  const double direct = integrate(
      nu, [&](double x) {
        const double sr = r * x, h = std::sin(0.5 * theta);
        return sr / ((sr - 1.0) * (sr - 1.0) + 4.0 * sr * h * h);
      }, {},
      std::vector<KernelFeature>{{std::cos(theta) / r, std::sin(theta) / r}});
  CHECK(poisson_integral(nu, r, theta, [](double v, double) { return v; }) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("inversion") {
  const auto mp = Measure::marchenko_pastur();
  const auto inv = invert_measure(mp);
  CHECK(inv.kind() == MeasureKind::named);
  CHECK(inv.describe() == "marchenko_pastur_inverse");
  for (double x : {0.3, 1.0, 5.0, 40.0}) CHECK(inv.cdf(x) == doctest::Approx(mp.sf(1.0 / x)).epsilon(1e-14));

  const auto atoms = invert_measure(Measure::atomic({{0.25, 0.5}, {0.75, 4.0}}));
  REQUIRE(atoms.atoms().size() == 2);
  CHECK(atoms.atoms()[0].location == doctest::Approx(0.25));
  CHECK(atoms.atoms()[0].weight == doctest::Approx(0.75));

  const auto g = Measure::gamma(3.0, 1.0);
  const auto gi = invert_measure(g);
  CHECK(gi.kind() == MeasureKind::grid);
  for (double x : {0.2, 0.5, 1.0}) CHECK(gi.cdf(x) == doctest::Approx(g.sf(1.0 / x)).epsilon(1e-4));
}

TEST_CASE("multiplicative symmetry") {
  CHECK(is_mult_symmetric(Measure::lambda(1.0), 1e-12));
  CHECK(is_mult_symmetric(Measure::boolean_stable(0.4), 1e-12));
  CHECK(is_mult_symmetric(Measure::log_normal(0.0, 1.3), 1e-12));
  CHECK(is_mult_symmetric(Measure::dirac(1.0), 1e-12));
  CHECK(is_mult_symmetric(Measure::atomic({{0.5, 0.5}, {0.5, 2.0}}), 1e-12));
  CHECK_FALSE(is_mult_symmetric(Measure::gamma(2.0, 1.0), 1e-6));
  CHECK_FALSE(is_mult_symmetric(Measure::log_normal(0.1, 1.0), 1e-6));
  CHECK_FALSE(is_mult_symmetric(Measure::marchenko_pastur(), 1e-6));
}

TEST_CASE("log pushforward integrates to one") {
  const auto ld = pushforward_log(Measure::log_normal(0.0, 1.0), RealGrid{-10, 10, 4001});
  double s = 0.0;
  for (std::size_t i = 1; i < ld.y.size(); ++i) s += 0.5 * (ld.p[i] + ld.p[i - 1]) * (ld.y[i] - ld.y[i - 1]);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("grid measures") {
  const auto g = Measure::grid({1.0, 2.0, 3.0}, {0.0, 1.0, 0.0});
  CHECK(g.density(1.5) == doctest::Approx(0.5));
  CHECK(g.cdf(2.0) == doctest::Approx(0.5));
  CHECK(g.quantile(0.5) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g.positive_runs().size() == 1);
  const auto gap = Measure::grid_normalized({1.0, 2.0, 3.0, 4.0, 5.0}, {1.0, 1.0, 0.0, 1.0, 1.0});
  CHECK(gap.positive_runs().size() == 1);
  const auto split = Measure::grid_normalized({1.0, 2.0, 2.5, 3.0, 4.0, 5.0}, {1.0, 0.0, 0.0, 0.0, 1.0, 1.0});
  CHECK(split.positive_runs().size() == 2);
  CHECK(integrate(split, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
}
