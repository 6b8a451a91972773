#include "expcorr/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "expcorr/anova.hpp"
#include "expcorr/error.hpp"
#include "expcorr/parallel.hpp"
#include "expcorr/random.hpp"
#include "expcorr/resampling.hpp"
#include "expcorr/special_functions.hpp"
#include "expcorr/synthetic.hpp"
#include "expcorr/validity.hpp"

namespace expcorr {

namespace {

enum StudyTag : std::uint64_t { kValidityStudy = 101, kMisfitStudy = 102 };

}  // namespace

ValidityCalibration run_validity_calibration(const ValidityCalibrationConfig& config) {
  if (config.reps == 0) throw DomainError("calibration needs at least one replication");
  const std::size_t U = config.u_values.size();
  ValidityCalibration out;
  out.config = config;
  out.p_values.assign(U, std::vector<double>(config.reps, 0.0));
  const GroupPlan plan = plan_groups(config.n, config.target_k);

  parallel_for(U * config.reps, config.threads, [&](std::size_t task) {
    const std::size_t u = task / config.reps;
    const std::size_t rep = task % config.reps;
    const std::uint64_t seed = derive_seed(config.seed, {kValidityStudy, u, rep});
    const DataTable table =
        gen_sensitivity(SensitivitySpec::from_qu(config.m, config.n, config.q, config.u_values[u], seed));
    const ResamplingSeries series = resample_series(table, plan, {config.replicates, seed, 1});
    out.p_values[u][rep] = validity_test(series, config.n).p_value;
  });

  out.rejection.assign(config.alphas.size(), std::vector<double>(U, 0.0));
  for (std::size_t a = 0; a < config.alphas.size(); ++a) {
    for (std::size_t u = 0; u < U; ++u) {
      const auto& ps = out.p_values[u];
      const auto hits = std::count_if(ps.begin(), ps.end(), [&](double p) { return p < config.alphas[a]; });
      out.rejection[a][u] = static_cast<double>(hits) / static_cast<double>(config.reps);
    }
  }
  return out;
}

std::size_t MisfitCurve::index_of(std::size_t complexity) const {
  const auto it = std::find(k.begin(), k.end(), complexity);
  if (it == k.end()) throw DomainError("complexity " + std::to_string(complexity) + " is not in the sweep");
  return static_cast<std::size_t>(it - k.begin());
}

std::size_t MisfitCurve::best_complexity() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < k.size(); ++i) {
    if (total(i) < total(best)) best = i;
  }
  return k.at(best);
}

MisfitCalibration run_misfit_calibration(const MisfitCalibrationConfig& config) {
  if (config.reps == 0) throw DomainError("calibration needs at least one replication");
  const std::size_t P = config.problems.size();
  const std::size_t K = config.k_max - config.k_first + 1;
  // verdicts[p][rep][k]
  std::vector<std::vector<std::vector<SweepPoint>>> sweeps(
      P, std::vector<std::vector<SweepPoint>>(config.reps));
  std::vector<IccEstimate> first_icc(P);

  parallel_for(P * config.reps, config.threads, [&](std::size_t task) {
    const std::size_t p = task / config.reps;
    const std::size_t rep = task % config.reps;
    const auto& spec = config.problems[p];
    const std::uint64_t seed = derive_seed(config.seed, {kMisfitStudy, p, rep});
    const RegressionProblem problem =
        gen_regression_problem(spec.m, config.n, config.k0, config.k_max, spec.q, seed);
    const double probability = 1.0 - config.alpha;
    const IccEstimate icc = icc_from_anova(anova(problem.table), std::span<const double>(&probability, 1));
    sweeps[p][rep] = complexity_sweep(problem, config.k_first, config.k_max, icc, config.alpha);
    if (rep == 0) first_icc[p] = icc;
  });

  MisfitCalibration out;
  out.config = config;
  for (std::size_t p = 0; p < P; ++p) {
    MisfitCurve curve;
    curve.problem = config.problems[p];
    curve.k.resize(K);
    curve.underfit.assign(K, 0.0);
    curve.overfit.assign(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) curve.k[i] = config.k_first + i;
    for (const auto& sweep : sweeps[p]) {
      for (std::size_t i = 0; i < K; ++i) {
        if (sweep[i].verdict == Verdict::underfit) curve.underfit[i] += 1.0;
        if (sweep[i].verdict == Verdict::overfit) curve.overfit[i] += 1.0;
      }
    }
    const double reps = static_cast<double>(config.reps);
    for (std::size_t i = 0; i < K; ++i) {
      curve.underfit[i] /= reps;
      curve.overfit[i] /= reps;
    }
    for (const auto& point : sweeps[p][0]) curve.first_statistic.push_back(point.statistic);
    curve.first_icc = first_icc[p].icc;
    curve.first_ci = first_icc[p].intervals.at(0);
    out.curves.push_back(std::move(curve));
  }
  return out;
}

CountRange binomial_acceptance(std::size_t trials, double p, double coverage) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial probability outside [0,1]");
  const double tail = (1.0 - coverage) / 2.0;
  std::vector<double> pmf(trials + 1, 0.0);
  for (std::size_t k = 0; k <= trials; ++k) {
    if (p == 0.0) {
      pmf[k] = k == 0 ? 1.0 : 0.0;
    } else if (p == 1.0) {
      pmf[k] = k == trials ? 1.0 : 0.0;
    } else {
      const double nk = static_cast<double>(trials);
      const double kk = static_cast<double>(k);
      pmf[k] = std::exp(log_gamma(nk + 1.0) - log_gamma(kk + 1.0) - log_gamma(nk - kk + 1.0) +
                        kk * std::log(p) + (nk - kk) * std::log1p(-p));
    }
  }
  CountRange range{0, trials};
  double lower_mass = 0.0;
  while (range.lo < trials && lower_mass + pmf[range.lo] <= tail) lower_mass += pmf[range.lo++];
  double upper_mass = 0.0;
  while (range.hi > range.lo && upper_mass + pmf[range.hi] <= tail) upper_mass += pmf[range.hi--];
  return range;
}

}  // namespace expcorr
