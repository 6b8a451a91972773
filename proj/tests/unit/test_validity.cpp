#include <doctest.h>

#include <cmath>

#include "expcorr/anova.hpp"
#include "expcorr/error.hpp"
#include "expcorr/synthetic.hpp"
#include "expcorr/validity.hpp"
#include "oracles.hpp"

using namespace expcorr;

namespace {

ResamplingSeries exact_series(double q, const GroupPlan& plan, double sd, std::size_t replicates = 500) {
  ResamplingSeries s;
  s.replicates = replicates;
  for (std::size_t size : plan.sizes()) {
    s.entries.push_back({size, extrapolate_icc(q, static_cast<double>(size)), sd});
  }
  return s;
}

}  // namespace

TEST_CASE("an exactly hyperbolic series recovers q with zero statistic") {
  for (double q : {0.01, 0.0625, 0.25, 1.5}) {
    const auto series = exact_series(q, plan_groups(94), 0.05);
    const ValidityReport report = validity_test(series, 94);
    CAPTURE(q);
    CHECK(report.converged);
    CHECK(report.q_opt == doctest::Approx(q).epsilon(1e-9));
    CHECK(report.chi2 <= 1e-12);
    CHECK(report.df == 11);
    CHECK(report.p_value == doctest::Approx(1.0));
    CHECK(report.extrapolated_r == doctest::Approx(extrapolate_icc(q, 94)).epsilon(1e-9));
    REQUIRE(report.predicted.size() == 11);
    CHECK(report.predicted[0] == doctest::Approx(series.entries[0].r_mean).epsilon(1e-9));
  }
}

TEST_CASE("chi2_statistic of a single entry one SD off is T") {
  ResamplingSeries s;
  s.replicates = 500;
  const double q = 0.1;
  s.entries.push_back({10, extrapolate_icc(q, 10) + 0.02, 0.02});
  CHECK(chi2_statistic(s, q) == doctest::Approx(500.0).epsilon(1e-12));
}

TEST_CASE("a single group size is fit exactly") {
  ResamplingSeries s;
  s.replicates = 200;
  s.entries.push_back({8, 0.4, 0.1});
  const ValidityReport report = validity_test(s, 16);
  CHECK(report.df == 1);
  CHECK(report.q_opt == doctest::Approx(q_from_icc(0.4, 8)).epsilon(1e-9));
  CHECK(report.chi2 <= 1e-12);
  CHECK(report.p_value == doctest::Approx(1.0));
}

TEST_CASE("zero spread is rejected") {
  const auto series = exact_series(0.1, plan_groups(24), 0.0);
  CHECK_THROWS_AS(chi2_statistic(series, 0.1), DegenerateError);
  CHECK_THROWS_AS(fit_q(series), DegenerateError);
}

TEST_CASE("the fitted q is a stationary point and the global minimum") {
  const DataTable t = gen_additive(AdditiveSpec::from_q(120, 60, 0.0625, 31));
  const auto series = resample_series(t, plan_groups(60), {200, 8, 1});
  const QFit fit = fit_q(series);
  REQUIRE(fit.converged);
  const double q = fit.q;
  const double h = 1e-6 * std::abs(q);
  const double slope = (chi2_statistic(series, q + h) - chi2_statistic(series, q - h)) / (2.0 * h);
  const double curvature =
      (chi2_statistic(series, q + h) - 2.0 * chi2_statistic(series, q) + chi2_statistic(series, q - h)) / (h * h);
  CHECK(std::abs(slope * q) <= 1e-4 * std::max(1.0, chi2_statistic(series, q)));
  CHECK(curvature > 0.0);
  const double grid_q = oracle::grid_minimize([&](double x) { return chi2_statistic(series, x); }, 1e-4, 10.0);
  CHECK(chi2_statistic(series, q) <= chi2_statistic(series, grid_q) + 1e-9);
  CHECK(q == doctest::Approx(grid_q).epsilon(1e-4));
}

TEST_CASE("additive data pass the validity test") {
  const DataTable t = gen_additive(AdditiveSpec::from_q(200, 60, 0.0625, 17));
  const auto series = resample_series(t, plan_groups(60), {300, 17, 1});
  const ValidityReport report = validity_test(series, 60);
  CHECK(report.converged);
  CHECK(report.p_value >= 0.001);
  const double rho = AdditiveSpec::from_q(200, 60, 0.0625, 17).population_icc(60);
  CHECK(std::abs(report.extrapolated_r - rho) <= 0.05);
}

TEST_CASE("strong participant sensitivity fails the validity test") {
  const DataTable t = gen_sensitivity(SensitivitySpec::from_qu(360, 120, 1.0 / 16.0, 0.25, 23));
  const auto series = resample_series(t, plan_groups(120), {500, 23, 1});
  const ValidityReport report = validity_test(series, 120);
  CHECK(report.rejected(0.01));
}
