#include <benchmark/benchmark.h>

#include "expcorr/anova.hpp"
#include "expcorr/resampling.hpp"
#include "expcorr/special_functions.hpp"
#include "expcorr/synthetic.hpp"
#include "expcorr/validity.hpp"

using namespace expcorr;

namespace {

void BM_Anova(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const DataTable t = gen_additive(AdditiveSpec::from_q(m, 94, 0.1333, 1));
  for (auto _ : state) benchmark::DoNotOptimize(icc_from_anova(anova(t)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m * 94));
}
BENCHMARK(BM_Anova)->Arg(100)->Arg(770);

void BM_QuantF(benchmark::State& state) {
  const double d1 = static_cast<double>(state.range(0));
  const double d2 = static_cast<double>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(quant_f(Probability(0.995), DegreesOfFreedom(d1), DegreesOfFreedom(d2)));
  }
}
BENCHMARK(BM_QuantF)->Args({5, 60})->Args({769, 71678});

void BM_ResampleSeries(benchmark::State& state) {
  const auto threads = static_cast<unsigned>(state.range(0));
  const DataTable t = gen_additive(AdditiveSpec::from_q(770, 94, 0.1333, 2));
  const GroupPlan plan = plan_groups(94);
  for (auto _ : state) benchmark::DoNotOptimize(resample_series(t, plan, {500, 3, threads}));
}
BENCHMARK(BM_ResampleSeries)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ValidityTest(benchmark::State& state) {
  const DataTable t = gen_additive(AdditiveSpec::from_q(360, 120, 1.0 / 16.0, 4));
  const auto series = resample_series(t, plan_groups(120), {500, 5, 1});
  for (auto _ : state) benchmark::DoNotOptimize(validity_test(series, 120));
}
BENCHMARK(BM_ValidityTest);

void BM_RegressionProblem(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen_regression_problem(m, 40, 20, 60, 0.25, ++seed));
}
BENCHMARK(BM_RegressionProblem)->Arg(61)->Arg(610)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
