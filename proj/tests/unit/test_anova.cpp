#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "expcorr/anova.hpp"
#include "expcorr/error.hpp"
#include "expcorr/special_functions.hpp"
#include "oracles.hpp"

using namespace expcorr;

namespace {

std::vector<double> random_values(std::size_t m, std::size_t n, std::uint64_t seed, double q) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> item(m), person(n), x(m * n);
  for (auto& b : item) b = std::sqrt(q) * z(gen);
  for (auto& a : person) a = z(gen);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) x[i * n + j] = item[i] + person[j] + z(gen);
  }
  return x;
}

}  // namespace

TEST_CASE("anova of a 2x2 table") {
  const DataTable t = DataTable::complete(2, 2, std::vector<double>{1, 2, 2, 5});
  const AnovaResult a = anova(t);
  CHECK(a.ssi == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(a.ssp == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(a.sse == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a.sst == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(a.dfi == 1.0);
  CHECK(a.dfp == 1.0);
  CHECK(a.dfe == 1.0);
  const IccEstimate e = icc_from_anova(a);
  REQUIRE(e.q_hat.has_value());
  CHECK(*e.q_hat == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(e.icc == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(e.f_obs == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(e.intervals.size() == 3);
}

TEST_CASE("anova of a constant table has zero sums of squares and is degenerate") {
  const DataTable t = DataTable::complete(3, 4, std::vector<double>(12, 7.5));
  const AnovaResult a = anova(t);
  CHECK(a.ssi == 0.0);
  CHECK(a.ssp == 0.0);
  CHECK(a.sse == 0.0);
  CHECK(a.sst == 0.0);
  CHECK(a.degenerate());
  const IccEstimate e = icc_from_anova(a);
  CHECK(e.degenerate());
  CHECK(e.icc == 1.0);
  CHECK(e.intervals.empty());
  CHECK_FALSE(e.warnings.empty());
}

TEST_CASE("a perfectly additive table is degenerate") {
  std::vector<double> x(5 * 6);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 6; ++j) x[i * 6 + j] = 0.3 * i * i + 1.7 * j + 400.0;
  }
  IccEstimate e = icc_from_anova(anova(DataTable::complete(5, 6, x)));
  CHECK(e.degenerate());
  CHECK_THROWS_AS(ensure_interval(e, 0.9), DegenerateError);
}

TEST_CASE("anova matches the textbook oracle on complete tables") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t m = 3 + seed % 11, n = 2 + seed % 7;
    const auto x = random_values(m, n, seed, 0.4);
    const AnovaResult a = anova(DataTable::complete(m, n, x));
    const oracle::Anova o = oracle::anova_complete(x, m, n);
    CAPTURE(seed);
    CHECK(std::abs(a.ssi - o.ssi) <= 1e-9 * o.sst);
    CHECK(std::abs(a.ssp - o.ssp) <= 1e-9 * o.sst);
    CHECK(std::abs(a.sse - o.sse) <= 1e-9 * o.sst);
    CHECK(std::abs(a.sst - o.sst) <= 1e-9 * o.sst);
    CHECK(a.dfi == o.dfi);
    CHECK(a.dfp == o.dfp);
    CHECK(a.dfe == o.dfe);
    CHECK(a.msi == doctest::Approx(o.msi).epsilon(1e-9));
    CHECK(a.mse == doctest::Approx(o.mse).epsilon(1e-9));
  }
}

TEST_CASE("sums of squares partition the total") {
  const std::size_t m = 40, n = 15;
  auto x = random_values(m, n, 77, 0.2);
  std::mt19937_64 gen(4);
  std::bernoulli_distribution keep(0.9);
  std::unique_ptr<bool[]> present(new bool[m * n]);
  for (std::size_t k = 0; k < m * n; ++k) present[k] = k % n == (k / n) % n || keep(gen);
  const AnovaResult a = anova(DataTable::from_rows(m, n, x, std::span<const bool>(present.get(), m * n)));
  CHECK(std::abs(a.ssi + a.ssp + a.sse - a.sst) <= 1e-10 * a.sst);
  CHECK(a.total_present < m * n);
  CHECK(a.dfe == doctest::Approx(static_cast<double>(a.total_present) - m - n + 1));
}

TEST_CASE("icc is invariant to affine rescaling of every cell") {
  const std::size_t m = 50, n = 20;
  const auto x = random_values(m, n, 9, 0.1);
  const DataTable t = DataTable::complete(m, n, x);
  const double base = icc_from_anova(anova(t)).icc;
  for (auto [scale, shift] : {std::pair{1000.0, 0.0}, {0.001, 0.0}, {-3.0, 1000.0}, {250.0, 1e6}}) {
    const DataTable u = t.transformed([scale, shift](std::size_t, std::size_t, double v) {
      return scale * v + shift;
    });
    CAPTURE(scale);
    CAPTURE(shift);
    CHECK(std::abs(icc_from_anova(anova(u)).icc - base) <= 1e-10);
  }
}

TEST_CASE("icc is invariant to per-participant shifts") {
  const std::size_t m = 30, n = 12;
  const auto x = random_values(m, n, 10, 0.3);
  const DataTable t = DataTable::complete(m, n, x);
  const double base = icc_from_anova(anova(t)).icc;
  const DataTable shifted =
      t.transformed([](std::size_t, std::size_t j, double v) { return v + 17.0 * static_cast<double>(j * j); });
  CHECK(std::abs(icc_from_anova(anova(shifted)).icc - base) <= 1e-10);
}

TEST_CASE("icc clamps to zero when item variance is below residual variance") {
  // Item means are equal, so msi = 0 < mse.
  const DataTable t = DataTable::complete(2, 3, std::vector<double>{1, 2, 3, 3, 2, 1});
  const IccEstimate e = icc_from_anova(anova(t));
  REQUIRE(e.q_hat.has_value());
  CHECK(*e.q_hat == 0.0);
  CHECK(e.icc == 0.0);
  CHECK(e.intervals.empty());
  CHECK_FALSE(e.warnings.empty());
}

TEST_CASE("icc interval formula and ordering") {
  const double f = 6.5, dfi = 119.0, dfe = 16541.0;
  const ConfidenceInterval ci = icc_interval(f, dfi, dfe, 0.99);
  const double upper_f = quant_f(Probability(0.995), DegreesOfFreedom(dfi), DegreesOfFreedom(dfe));
  const double lower_f = quant_f(Probability(0.995), DegreesOfFreedom(dfe), DegreesOfFreedom(dfi));
  CHECK(ci.lower == doctest::Approx(1.0 - upper_f / f).epsilon(1e-12));
  CHECK(ci.upper == doctest::Approx(1.0 - 1.0 / (f * lower_f)).epsilon(1e-12));
  CHECK(ci.lower < 1.0 - 1.0 / f);
  CHECK(ci.upper > 1.0 - 1.0 / f);
  const ConfidenceInterval wide = icc_interval(f, dfi, dfe, 0.999);
  CHECK(wide.lower < ci.lower);
  CHECK(wide.upper > ci.upper);
}

TEST_CASE("ensure_interval adds missing probabilities once") {
  const auto x = random_values(20, 10, 3, 0.5);
  IccEstimate e = icc_from_anova(anova(DataTable::complete(20, 10, x)));
  CHECK(e.interval_at(0.95) != nullptr);
  CHECK(e.interval_at(0.9) == nullptr);
  const ConfidenceInterval ci = ensure_interval(e, 0.9);
  CHECK(ci.probability == 0.9);
  CHECK(e.intervals.size() == 4);
  ensure_interval(e, 0.9);
  CHECK(e.intervals.size() == 4);
}

TEST_CASE("Spearman-Brown extrapolation helpers") {
  CHECK(extrapolate_icc(0.1333, 25) == doctest::Approx(0.769).epsilon(1e-3));
  CHECK(q_from_icc(0.9261, 94) == doctest::Approx(0.1332).epsilon(1e-3));
  CHECK(extrapolate_icc(0.0, 50) == 0.0);
  for (double q : {0.01, 0.0625, 0.25, 2.0}) {
    for (double n : {1.0, 10.0, 94.0}) {
      CHECK(q_from_icc(extrapolate_icc(q, n), n) == doctest::Approx(q).epsilon(1e-12));
    }
  }
  CHECK(participants_needed(0.0625, 0.8) == doctest::Approx(64.0).epsilon(1e-12));
  CHECK(extrapolate_icc(0.0625, participants_needed(0.0625, 0.8)) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_THROWS_AS(q_from_icc(1.0, 10), DomainError);
  CHECK_THROWS_AS(participants_needed(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(participants_needed(0.1, 1.0), DomainError);
  CHECK_THROWS_AS(extrapolate_icc(0.1, 0.0), DomainError);
}

TEST_CASE("95% intervals cover the population icc at about the nominal rate") {
  const std::size_t m = 30, n = 8, reps = 400;
  const double q = 0.25;
  const double rho = extrapolate_icc(q, static_cast<double>(n));
  std::size_t covered = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto x = random_values(m, n, 1000 + r, q);
    const IccEstimate e = icc_from_anova(anova(DataTable::complete(m, n, x)));
    const auto* ci = e.interval_at(0.95);
    if (ci != nullptr && ci->contains(rho)) ++covered;
  }
  // Binomial(400, 0.95) central 99.9% region is roughly [366, 392].
  CHECK(covered >= 366);
  CHECK(covered <= 392);
}
