#include "expcorr/validity.hpp"

#include <algorithm>
#include <cmath>

#include "expcorr/anova.hpp"
#include "expcorr/error.hpp"
#include "expcorr/special_functions.hpp"

namespace expcorr {

namespace {

void require_spread(const ResamplingSeries& series) {
  if (series.entries.empty()) throw DomainError("resampling series is empty");
  for (const auto& e : series.entries) {
    if (!(e.r_sd > 0.0)) {
      throw DegenerateError("resampled correlations have zero spread at group size " +
                            std::to_string(e.group_size) + " (noise-free data?)");
    }
  }
}

}  // namespace

double chi2_statistic(const ResamplingSeries& series, double q) {
  require_spread(series);
  double sum = 0.0;
  for (const auto& e : series.entries) {
    const double z = (e.r_mean - extrapolate_icc(q, static_cast<double>(e.group_size))) / e.r_sd;
    sum += z * z;
  }
  return static_cast<double>(series.replicates) * sum;
}

QFit fit_q(const ResamplingSeries& series) {
  require_spread(series);
  constexpr double kMaxR = 1.0 - 1e-9;
  const double T = static_cast<double>(series.replicates);

  double weighted = 0.0;
  double weight_sum = 0.0;
  for (const auto& e : series.entries) {
    const double w = 1.0 / (e.r_sd * e.r_sd);
    weighted += w * q_from_icc(std::min(e.r_mean, kMaxR), static_cast<double>(e.group_size));
    weight_sum += w;
  }

  QFit fit;
  double q0 = weighted / weight_sum;
  double q = q0;
  bool todo = true;
  while (todo && fit.iterations < kFitMaxIterations) {
    // First and second derivatives of chi2 in q. n/(nq+1) stands for rho/q,
    // which it equals for q != 0 and stays finite at q = 0.
    double d1 = 0.0;
    double d2 = 0.0;
    for (const auto& e : series.entries) {
      const double n = static_cast<double>(e.group_size);
      const double rho = extrapolate_icc(q0, n);
      const double slope = n / (n * q0 + 1.0);
      const double var = e.r_sd * e.r_sd;
      d1 += slope * (e.r_mean - rho) * (rho - 1.0) / var;
      d2 += slope * slope * ((rho - 1.0) * (rho - 1.0) + 2.0 * (e.r_mean - rho) * (1.0 - rho)) / var;
    }
    d1 *= 2.0 * T;
    d2 *= 2.0 * T;
    const double dq = d1 / d2;
    q = q0 - dq;
    ++fit.iterations;
    if (!std::isfinite(q)) break;
    if (std::abs(dq) <= std::abs(kFitTolerance * q)) {
      todo = false;
    } else {
      q0 = q;
    }
  }
  fit.q = q;
  fit.converged = !todo;
  if (!fit.converged) fit.warnings.emplace_back("Newton-Raphson method failed to converge");
  return fit;
}

ValidityReport validity_test(const ResamplingSeries& series, std::size_t participants) {
  const QFit fit = fit_q(series);
  ValidityReport report;
  report.q_opt = fit.q;
  report.converged = fit.converged;
  report.iterations = fit.iterations;
  report.warnings = fit.warnings;
  if (!std::isfinite(fit.q)) throw DegenerateError("q optimization diverged");
  report.chi2 = chi2_statistic(series, fit.q);
  report.df = series.entries.size();
  report.p_value = 1.0 - prob_chi2(report.chi2, DegreesOfFreedom(static_cast<double>(report.df)));
  report.predicted.reserve(series.entries.size());
  for (const auto& e : series.entries) {
    report.predicted.push_back(extrapolate_icc(fit.q, static_cast<double>(e.group_size)));
  }
  report.extrapolated_r = extrapolate_icc(fit.q, static_cast<double>(participants));
  if (fit.q < 0.0) {
    report.warnings.emplace_back("optimal q is negative; the data show no reliable item effect");
  }
  return report;
}

}  // namespace expcorr
