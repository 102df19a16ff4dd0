#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "freemult/criteria.hpp"
#include "freemult/errors.hpp"
#include "freemult/unimodality.hpp"
#include "freemult/zhong.hpp"

using namespace freemult;
using std::numbers::pi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("Theta_R closed form for a point mass") {
  CHECK(theta_R(Measure::dirac(1.0), pi / 2, 1.0) == doctest::Approx(1.0 / pi).epsilon(1e-15));
  for (double R : {0.1, 1.0, 2.5}) {
    for (double r : {0.3, 1.0, 4.0}) {
      const double sh = std::sin(R / 2);
      const double want = std::sin(R) / R * r / ((r - 1) * (r - 1) + 4 * r * sh * sh);
      CHECK(theta_R(Measure::dirac(1.0), R, r) == doctest::Approx(want).epsilon(1e-14));
    }
  }
  const auto nu = Measure::uniform(1.0, 2.0);
  CHECK(theta_R(nu, 1.0, 1e-9) < 1e-8);
  CHECK(theta_R(nu, 1.0, 1e9) < 1e-8);
  CHECK(code_of([&] { theta_R(nu, 0.0, 1.0); }) == ErrorCode::DomainError);
}

TEST_CASE("Theta_R for a density agrees with direct integration") {
  const auto nu = Measure::uniform(1.0, 2.0);
  for (double R : {0.05, 0.7, 2.0}) {
    for (double r : {0.4, 0.8, 1.3}) {
      // int_1^2 r x / (1 + r^2 x^2 - 2 r x cos R) dx, closed form
      const double c = std::cos(R), s = std::sin(R);
      auto F = [&](double x) {
        const double u = r * x;
        return (0.5 * std::log(u * u - 2 * u * c + 1) + c / s * std::atan((u - c) / s)) / r;
      };
      CHECK(theta_R(nu, R, r) == doctest::Approx(s / R * (F(2.0) - F(1.0))).epsilon(1e-11));
    }
  }
}

TEST_CASE("solution counts for a point mass at R = pi/2") {
  const auto nu = Measure::dirac(1.0);
  const auto two = count_theta_solutions(nu, pi / 2, 2 * pi);
  REQUIRE(two.count == 2);
  CHECK_FALSE(two.boundary);
  // r / (1 + r^2) = 1/4
  CHECK(two.locations[0] == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-9));
  CHECK(two.locations[1] == doctest::Approx(2.0 + std::sqrt(3.0)).epsilon(1e-9));

  CHECK(count_theta_solutions(nu, pi / 2, 2.0).count == 0);

  const auto tangent = count_theta_solutions(nu, pi / 2, pi);
  CHECK(tangent.count == 1);
  CHECK(tangent.count_with_multiplicity == 2);
  CHECK(tangent.boundary);
  CHECK(tangent.locations[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("solution counting finds root pairs inside one grid cell") {
  // grid nodes sit at log r = +-0.0366 where F = 0.226; both roots lie in between
  auto F = [](double r) { return std::exp(-std::pow(std::log(r) / 0.03, 2)); };
  const auto c = count_solutions(F, 0.9, {0.1, 10.0}, 64);
  REQUIRE(c.count == 2);
  CHECK_FALSE(c.boundary);
  CHECK(std::log(c.locations[1]) == doctest::Approx(0.03 * std::sqrt(std::log(1 / 0.9))).epsilon(1e-8));
  CHECK(std::log(c.locations[0]) == doctest::Approx(-0.03 * std::sqrt(std::log(1 / 0.9))).epsilon(1e-8));
}

TEST_CASE("window must see the equation below its level") {
  auto F = [](double r) { return 1.0 / r; };
  CHECK(code_of([&] { count_solutions(F, 0.5, {0.1, 10.0}); }) == ErrorCode::WindowTooNarrow);
}

TEST_CASE("R sweep layout") {
  const auto R = default_R_sweep();
  REQUIRE(R.size() == 64);
  CHECK(R.front() == doctest::Approx(0.01));
  CHECK(R.back() == doctest::Approx(pi - 0.01));
  for (std::size_t k = 1; k < R.size(); ++k) CHECK(R[k] > R[k - 1]);
  CHECK(R[1] - R[0] < R[32] - R[31]);
}

TEST_CASE("D bound") {
  CHECK(d_bound(1.0, 1.1) == doctest::Approx(21.285774973453982).epsilon(1e-13));
  CHECK(code_of([] { d_bound(1.0, 2.0); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([] { d_bound(2.0, 1.0); }) == ErrorCode::HypothesisViolated);
  CHECK(std::isinf(d_bound(1.0, 1.0)));
  // alpha -> beta: the radicand vanishes and D grows without bound
  double prev = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-6}) {
    const double d = d_bound(1.0 - eps, 1.0);
    CHECK(d > prev);
    prev = d;
  }
  CHECK(prev > 1e3);
}

TEST_CASE("D bound diverges at the hypothesis boundary") {
  // beta^4 - 3 alpha^4 = 2 alpha^3 beta at alpha = 1: beta^4 - 2 beta - 3 = 0
  const double beta_star = 1.5747430738870218;
  CHECK(std::pow(beta_star, 4) - 2 * beta_star - 3 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  double prev = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-5}) {
    const double d = d_bound(1.0, beta_star - eps);
    CHECK(d > prev);
    prev = d;
  }
  CHECK(prev > 1e3);
}

TEST_CASE("case II gap check") {
  const auto nu = Measure::uniform(1.0, 1.1);
  const auto g = case2_gap_check(nu, 1.0, 1.1, d_bound(1.0, 1.1));
  CHECK(g.holds);
  CHECK(g.min_margin > 0.0);
  CHECK(g.samples == 64 * 64);
  CHECK(g.cos_threshold == doctest::Approx((3 - std::pow(1.1, 4)) / 2.2));
  // degenerate alpha = beta: no admissible R
  CHECK(case2_gap_check(Measure::dirac(1.0), 1.0, 1.0, 10.0).holds);
}

TEST_CASE("multiplicative convolution") {
  const auto g = Measure::gamma(2.0, 1.0);
  const auto id = mult_convolve(g, Measure::dirac(1.0));
  for (double x : {0.2, 1.0, 2.0, 5.0}) CHECK(id.density(x) == doctest::Approx(g.density(x)).epsilon(1e-3));

  const auto dd = mult_convolve(Measure::dirac(2.0), Measure::dirac(3.0));
  REQUIRE(dd.atoms().size() == 1);
  CHECK(dd.atoms()[0].location == doctest::Approx(6.0));

  const auto ln = mult_convolve(Measure::log_normal(0.0, 1.0), Measure::log_normal(0.0, 1.0));
  const auto ref = Measure::log_normal(0.0, std::sqrt(2.0));
  double err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::exp(-6.0 + 12.0 * i / 999);
    err = std::max(err, std::abs(ln.density(x) - ref.density(x)));
  }
  CHECK(err < 1e-3);

  const auto aa = mult_convolve(Measure::atomic({{0.5, 1.0}, {0.5, 2.0}}), Measure::atomic({{0.5, 1.0}, {0.5, 2.0}}));
  REQUIRE(aa.atoms().size() == 3);
  CHECK(aa.atoms()[1].weight == doctest::Approx(0.5));

  CHECK(code_of([] {
          mult_convolve(Measure::atomic({{0.5, 1e-30}, {0.5, 1e30}}), Measure::uniform(1.0, 1.0001), {256});
        }) == ErrorCode::GridUnderflow);
}

TEST_CASE("convolution of multiplicatively symmetric log-unimodal laws") {
  for (const auto& [a, b] : {std::pair{Measure::lambda(2.0), Measure::lambda(pi / 2)},
                             std::pair{Measure::log_normal(0.0, 1.0), Measure::lambda(1.0)}}) {
    const auto r = is_log_unimodal(mult_convolve(a, b));
    CHECK(r.verdict == Verdict::unimodal);
    CHECK(r.modes[0] == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("kernel-integral form equals Theta_B scaled by B / sin B") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<Measure> fixtures = {Measure::uniform(1.0, 2.0), Measure::lambda(pi / 2), Measure::dirac(1.0),
                                         Measure::gamma(2.0, 1.0)};
  for (int k = 0; k < 40; ++k) {
    const auto& nu = fixtures[k % fixtures.size()];
    const double t = 0.1 + 10.0 * U(rng);
    const double B = 0.02 + (pi - 0.04) * U(rng);
    const double a = B / (pi * t);
    const double r = std::exp(4.0 * U(rng) - 2.0);
    CAPTURE(k);
    CHECK(lemma41_condition2_lhs(nu, a, t, r) == doctest::Approx(theta_R(nu, B, r) * B / std::sin(B)).epsilon(1e-10));
  }
}

TEST_CASE("kernel-integral and Theta_R forms have the same solutions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<Measure> fixtures = {Measure::uniform(1.0, 2.0), Measure::lambda(pi / 2), Measure::dirac(1.0)};
  for (int k = 0; k < 20; ++k) {
    const auto& nu = fixtures[k % 3];
    const double t = std::exp(std::log(0.2) + std::log(100.0) * U(rng));
    const double R = 0.05 + (pi - 0.1) * U(rng);
    CAPTURE(nu.describe());
    CAPTURE(t);
    CAPTURE(R);
    const auto c3 = count_theta_solutions(nu, R, t, std::nullopt, 1024);
    const auto c2 = count_condition2_solutions(nu, R / (pi * t), t, std::nullopt, 1024);
    CHECK(c2.count == c3.count);
    CHECK(c2.count_with_multiplicity == c3.count_with_multiplicity);
    for (std::size_t i = 0; i < std::min(c2.locations.size(), c3.locations.size()); ++i) {
      CHECK(c2.locations[i] == doctest::Approx(c3.locations[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("lambda_B convolved with nu^-1: kernel integral against the log-grid convolution") {
  const auto nu = Measure::uniform(1.0, 2.0);
  for (double B : {0.5, 1.0, 2.5}) {
    const auto conv = mult_convolve(Measure::lambda(B), invert_measure(nu));
    double err = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double r = std::exp(-4.0 + 8.0 * i / 399);
      err = std::max(err, std::abs(conv.density(r) - lambda_convolution_density(nu, B, r)));
    }
    CAPTURE(B);
    CHECK(err < 2e-3);
  }
}

TEST_CASE("counterexample family") {
  const auto [nu, spec] = build_counterexample(30);
  CHECK(spec.N == 30);
  CHECK(spec.decreasing);
  CHECK(spec.ratios_decreasing);
  CHECK(nu.atoms().size() == 30);
  CHECK(spec.partial_sum_w_over_a < 315.0 / (2.0 * std::pow(pi, 4)));
  CHECK(spec.partial_sum_w_over_a > 1.58);
  // full weight series is 945 zeta(6) / pi^6 = 1
  CHECK(spec.raw_mass < 1.0);
  CHECK(spec.remainder_mass == doctest::Approx(1.0 - spec.raw_mass));
  CHECK(spec.remainder_mass < 1e-6);
  double total = 0.0;
  for (const auto& a : nu.atoms()) total += a.weight;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  // k = 10: a_k a_{k+1} (a_k + a_{k+1}) / (a_k - a_{k+1})^2 with a_n = n^-4
  const double a = std::pow(10.0, -4), b = std::pow(11.0, -4);
  CHECK(spec.ratios[9] == doctest::Approx(a * b * (a + b) / ((a - b) * (a - b))).epsilon(1e-14));
  CHECK(spec.ratios[9] < 2e-3);
  CHECK(spec.midpoints[0] == doctest::Approx(0.5 * (16.0 + 1.0)));

  const auto inv = build_counterexample(30, example48_rules(), true).first;
  CHECK(inv.atoms().back().location == doctest::Approx(std::pow(30.0, 4)));

  CounterexampleRules bad{"bad", [](int) { return 0.1; }, [](int n) { return n == 3 ? 5.0 : 1.0 / n; }};
  CHECK(code_of([&] { build_counterexample(5, bad); }) == ErrorCode::HypothesisViolated);
  CHECK(code_of([] { build_counterexample(2); }) == ErrorCode::DomainError);
}

TEST_CASE("gap certificates") {
  const auto nu = build_counterexample(30).first;
  const auto c1 = first_gap_certificate(nu, 1.0);
  REQUIRE(c1.has_value());
  CHECK(c1->below);
  CHECK(c1->k <= 29);
  CHECK(c1->f_at_bk < 1.0);
  CHECK(f_blowup(nu, 1.0 / std::pow(c1->k, -4)) > 1.0);

  const auto c100 = first_gap_certificate(nu, 100.0);
  REQUIRE(c100.has_value());
  CHECK(c100->k > c1->k);

  CHECK(code_of([] { gap_certificate(Measure::dirac(1.0), 1.0, 1); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { gap_certificate(nu, 1.0, 30); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("counterexample yields a disconnected support and a non-unimodal curve") {
  const auto nu = build_counterexample(30).first;
  for (double t : {0.5, 1.0, 2.0}) {
    CAPTURE(t);
    const auto curve = density_curve(ZhongContext(nu, t));
    CHECK(curve.support.intervals.size() >= 2);
    std::vector<double> y, p;
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
      y.push_back(std::log(curve.x[i]));
      p.push_back(curve.x[i] * curve.q[i]);
    }
    CHECK(count_modes(y, p).verdict == Verdict::not_unimodal);
    CHECK(is_log_unimodal(curve).verdict == Verdict::not_unimodal);
  }
}

TEST_CASE("solution-count criterion agrees with the curve verdict") {
  struct Row {
    Measure nu;
    double t;
  };
  const std::vector<Row> rows = {
      {Measure::dirac(1.0), 1.0},
      {Measure::uniform(1.0, 2.0), 1.0},
      {build_counterexample(30).first, 1.0},
      {Measure::atomic({{0.5, 1.0}, {0.5, 4.0}}), 0.05},
  };
  for (const auto& row : rows) {
    CAPTURE(row.nu.describe());
    const auto sweep = theta_sweep(row.nu, row.t, default_R_sweep(), std::nullopt, 1024);
    const auto curve = is_log_unimodal(density_curve(ZhongContext(row.nu, row.t)));
    CHECK(sweep.verdict == (curve.verdict == Verdict::unimodal));
  }
}
