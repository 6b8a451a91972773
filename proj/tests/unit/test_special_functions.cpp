#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "expcorr/error.hpp"
#include "expcorr/special_functions.hpp"
#include "oracles.hpp"

using namespace expcorr;

TEST_CASE("probability and degrees of freedom validate their range") {
  CHECK(Probability(0.0).value() == 0.0);
  CHECK(Probability(1.0).value() == 1.0);
  CHECK_THROWS_AS(Probability(-1e-12), DomainError);
  CHECK_THROWS_AS(Probability(1.0 + 1e-12), DomainError);
  CHECK_THROWS_AS(Probability(std::nan("")), DomainError);
  CHECK(DegreesOfFreedom(3.0).value() == 3.0);
  CHECK_THROWS_AS(DegreesOfFreedom(0.0), DomainError);
  CHECK_THROWS_AS(DegreesOfFreedom(-2.0), DomainError);
  CHECK_THROWS_AS(DegreesOfFreedom{INFINITY}, DomainError);
}

TEST_CASE("log_gamma matches libm") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.0, 7.25, 30.0, 384.5, 34826.5}) {
    CAPTURE(x);
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13).scale(1.0));
  }
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
}

TEST_CASE("reg_inc_beta fixed values") {
  CHECK(reg_inc_beta(0.5, 1, 1).value() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(reg_inc_beta(1.0, 3, 7).value() == 1.0);
  CHECK(reg_inc_beta(0.0, 3, 7).value() == 0.0);
  CHECK(std::abs(reg_inc_beta(0.3, 2, 5) - oracle::beta_cdf(0.3, 2, 5)) <= 1e-10);
  // I_x(1, b) = 1 - (1-x)^b and I_x(a, 1) = x^a.
  CHECK(std::abs(reg_inc_beta(0.2, 1, 4) - (1.0 - std::pow(0.8, 4))) <= 1e-14);
  CHECK(std::abs(reg_inc_beta(0.7, 3, 1) - std::pow(0.7, 3)) <= 1e-14);
}

TEST_CASE("reg_inc_beta domain errors") {
  CHECK_THROWS_AS(reg_inc_beta(-0.1, 1, 1), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(1.1, 1, 1), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 0, 1), DomainError);
  CHECK_THROWS_AS(reg_inc_beta(0.5, 1, -1), DomainError);
}

TEST_CASE("reg_inc_beta agrees with the quadrature oracle on random points") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> shape(1.0, 25.0), where(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = shape(gen), b = shape(gen), x = where(gen);
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(x);
    CHECK(std::abs(reg_inc_beta(x, a, b) - oracle::beta_cdf(x, a, b)) <= 1e-8);
  }
}

TEST_CASE("reg_inc_beta is monotone in x") {
  for (auto [a, b] : {std::pair{0.5, 0.5}, {2.0, 5.0}, {60.0, 1170.0}}) {
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double v = reg_inc_beta(i / 1000.0, a, b);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("quant_beta fixed values") {
  CHECK(quant_beta(Probability(0.5), 1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(quant_beta(Probability(0.0), 2, 3) == 0.0);
  CHECK(quant_beta(Probability(1.0), 2, 3) == 1.0);
  const double x = quant_beta(Probability(0.975), 5, 60);
  CHECK(std::abs(reg_inc_beta(x, 5, 60) - 0.975) <= kQuantBetaTolerance);
}

TEST_CASE("quant_beta round trip over a probability grid") {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {0.5, 0.5}, {2.0, 5.0}, {5.0, 60.0}, {30.0, 1170.0}, {59.5, 8270.5}}) {
    for (int i = 1; i <= 999; i += 7) {
      const double p = i / 1000.0;
      const double x = quant_beta(Probability(p), a, b);
      CAPTURE(a);
      CAPTURE(b);
      CAPTURE(p);
      CHECK(std::abs(reg_inc_beta(x, a, b) - p) <= kQuantBetaTolerance);
    }
  }
}

TEST_CASE("quant_f closed forms and domain") {
  CHECK(quant_f(Probability(0.95), DegreesOfFreedom(2), DegreesOfFreedom(2)) == doctest::Approx(19.0).epsilon(1e-9));
  for (double d : {1.0, 2.0, 7.0, 40.0, 1000.0}) {
    CAPTURE(d);
    CHECK(quant_f(Probability(0.5), DegreesOfFreedom(d), DegreesOfFreedom(d)) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(quant_f(Probability(1.0), DegreesOfFreedom(2), DegreesOfFreedom(2)), DomainError);
  CHECK(quant_f(Probability(0.0), DegreesOfFreedom(2), DegreesOfFreedom(2)) == 0.0);
}

TEST_CASE("quant_f matches the quadrature and bisection oracle") {
  const double expected = oracle::f_quantile(0.995, 119, 16541);
  CHECK(std::abs(quant_f(Probability(0.995), DegreesOfFreedom(119), DegreesOfFreedom(16541)) - expected) <= 1e-4);
}

TEST_CASE("quant_f is strictly increasing in p") {
  for (auto [d1, d2] : {std::pair{2.0, 2.0}, {5.0, 60.0}, {119.0, 16541.0}}) {
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
      const double v = quant_f(Probability(i / 100.0), DegreesOfFreedom(d1), DegreesOfFreedom(d2));
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("quant_f reflection identity") {
  for (auto [d1, d2] : {std::pair{3.0, 8.0}, {10.0, 100.0}, {769.0, 69000.0}}) {
    for (double p : {0.005, 0.025, 0.3, 0.75, 0.995}) {
      const double forward = quant_f(Probability(p), DegreesOfFreedom(d1), DegreesOfFreedom(d2));
      const double backward = quant_f(Probability(1.0 - p), DegreesOfFreedom(d2), DegreesOfFreedom(d1));
      CAPTURE(d1);
      CAPTURE(d2);
      CAPTURE(p);
      CHECK(std::abs(forward * backward - 1.0) <= 1e-6);
    }
  }
}

TEST_CASE("prob_chi2 fixed values") {
  CHECK(prob_chi2(0.0, DegreesOfFreedom(5)).value() == 0.0);
  CHECK(std::abs(prob_chi2(2.0 * std::numbers::ln2, DegreesOfFreedom(2)) - 0.5) <= 1e-12);
  CHECK(std::abs(1.0 - prob_chi2(10.345, DegreesOfFreedom(11)) - 0.4996) <= 5e-5);
  CHECK_THROWS_AS(prob_chi2(-1.0, DegreesOfFreedom(2)), DomainError);
}

TEST_CASE("prob_chi2 df=2 closed form") {
  for (double x = 0.0; x <= 60.0; x += 0.37) {
    CAPTURE(x);
    CHECK(std::abs(prob_chi2(x, DegreesOfFreedom(2)) - (1.0 - std::exp(-x / 2.0))) <= 1e-10);
  }
}

TEST_CASE("prob_chi2 agrees with the quadrature oracle and is monotone") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> dfs(2, 40);
  std::uniform_real_distribution<double> scale(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double df = dfs(gen);
    const double x = scale(gen) * df;
    CAPTURE(df);
    CAPTURE(x);
    CHECK(std::abs(prob_chi2(x, DegreesOfFreedom(df)) - oracle::chi2_cdf(x, df)) <= 1e-8);
  }
  double prev = 0.0;
  for (double x = 0.0; x < 80.0; x += 0.25) {
    const double v = prob_chi2(x, DegreesOfFreedom(11));
    CHECK(v >= prev);
    prev = v;
  }
}
