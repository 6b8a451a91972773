#include "expcorr/anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "expcorr/error.hpp"
#include "expcorr/special_functions.hpp"

namespace expcorr {

AnovaResult anova(const DataTable& table) {
  const std::size_t m = table.items();
  const std::size_t n = table.participants();
  // Sums of squares are shift invariant; accumulating deviations from the
  // grand mean avoids cancellation in sum x^2 - t^2/N for data far from 0.
  double shift = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = table.column(j);
    const auto mask = table.column_mask(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (mask[i]) shift += col[i];
    }
  }
  shift /= static_cast<double>(table.present_count());

  std::vector<double> ti(m, 0.0);
  std::vector<double> ni(m, 0.0);
  std::vector<double> tj(n, 0.0);
  std::vector<double> nj(n, 0.0);
  double sx2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = table.column(j);
    const auto mask = table.column_mask(j);
    for (std::size_t i = 0; i < m; ++i) {
      if (!mask[i]) continue;
      const double x = col[i] - shift;
      ti[i] += x;
      ni[i] += 1.0;
      tj[j] += x;
      nj[j] += 1.0;
      sx2 += x * x;
    }
  }
  double t = 0.0;
  double big_n = 0.0;
  double sum_ti2 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    t += ti[i];
    big_n += ni[i];
    sum_ti2 += ti[i] * ti[i] / ni[i];
  }
  double sum_tj2 = 0.0;
  for (std::size_t j = 0; j < n; ++j) sum_tj2 += tj[j] * tj[j] / nj[j];

  AnovaResult a;
  a.n_effective = n;
  a.total_present = table.present_count();
  const double correction = t * t / big_n;
  a.sst = sx2 - correction;
  a.ssi = sum_ti2 - correction;
  a.ssp = sum_tj2 - correction;
  a.sse = a.sst - a.ssi - a.ssp;
  a.dfi = static_cast<double>(m - 1);
  a.dfp = static_cast<double>(n - 1);
  a.dfe = big_n - 1.0 - a.dfi - a.dfp;
  if (!(a.dfe > 0.0)) {
    throw DataError("residual degrees of freedom are not positive (N=" + std::to_string(a.total_present) +
                    "); the table is too small or too sparse");
  }
  // A residual at rounding level of the total is exactly additive data.
  const double noise_floor = 1e-12 * std::max(a.sst, 0.0);
  for (double* ss : {&a.sst, &a.ssi, &a.ssp}) *ss = std::max(*ss, 0.0);
  if (a.sse <= noise_floor) a.sse = 0.0;
  a.msi = a.ssi / a.dfi;
  a.msp = a.ssp / a.dfp;
  a.mse = a.sse / a.dfe;
  return a;
}

const ConfidenceInterval* IccEstimate::interval_at(double probability) const noexcept {
  for (const auto& ci : intervals) {
    if (std::abs(ci.probability - probability) <= 1e-12) return &ci;
  }
  return nullptr;
}

ConfidenceInterval icc_interval(double f_obs, double dfi, double dfe, double probability) {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw DomainError("confidence probability must lie in (0,1)");
  }
  const Probability upper_tail(1.0 - (1.0 - probability) / 2.0);
  const double f_items = quant_f(upper_tail, DegreesOfFreedom(dfi), DegreesOfFreedom(dfe));
  const double f_error = quant_f(upper_tail, DegreesOfFreedom(dfe), DegreesOfFreedom(dfi));
  return {probability, 1.0 - f_items / f_obs, 1.0 - 1.0 / (f_obs * f_error)};
}

IccEstimate icc_from_anova(const AnovaResult& a, std::span<const double> conf_probs) {
  IccEstimate est;
  est.n = a.n_effective;
  est.dfi = a.dfi;
  est.dfe = a.dfe;
  if (a.degenerate()) {
    est.icc = 1.0;
    est.f_obs = std::numeric_limits<double>::infinity();
    est.warnings.emplace_back(
        "residual mean square is zero (perfectly additive data); ICC reported as 1 without q or intervals");
    return est;
  }
  const double n = static_cast<double>(a.n_effective);
  const double item_variance = std::max(0.0, (a.msi - a.mse) / n);
  est.q_hat = item_variance / a.mse;
  est.icc = item_variance / (item_variance + a.mse / n);
  est.f_obs = a.msi / a.mse;
  if (a.msi < a.mse) {
    est.warnings.emplace_back("item mean square below residual mean square; ICC clamped to 0");
  }
  if (est.f_obs > 0.0) {
    for (double p : conf_probs) est.intervals.push_back(icc_interval(est.f_obs, a.dfi, a.dfe, p));
  } else {
    est.warnings.emplace_back("no item variance (F = 0); intervals not computed");
  }
  return est;
}

const ConfidenceInterval& ensure_interval(IccEstimate& estimate, double probability) {
  if (const auto* ci = estimate.interval_at(probability)) return *ci;
  if (estimate.degenerate() || !(estimate.f_obs > 0.0)) {
    throw DegenerateError("cannot compute an ICC interval for degenerate data");
  }
  estimate.intervals.push_back(icc_interval(estimate.f_obs, estimate.dfi, estimate.dfe, probability));
  return estimate.intervals.back();
}

double extrapolate_icc(double q, double n) {
  if (!(n > 0.0)) throw DomainError("extrapolate_icc: n must be positive");
  const double nq = n * q;
  return nq / (nq + 1.0);
}

double q_from_icc(double rho, double n) {
  if (!(n > 0.0)) throw DomainError("q_from_icc: n must be positive");
  if (!(rho < 1.0)) throw DomainError("q_from_icc: rho must be below 1");
  return rho / (n * (1.0 - rho));
}

double participants_needed(double q, double rho) {
  if (!(q > 0.0)) throw DomainError("participants_needed: q must be positive");
  if (!(rho > 0.0 && rho < 1.0)) throw DomainError("participants_needed: rho must lie in (0,1)");
  return rho / (q * (1.0 - rho));
}

}  // namespace expcorr
