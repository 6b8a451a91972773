#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expcorr/data_table.hpp"

namespace expcorr {

/// Two-way (items x participants) ANOVA decomposition without interaction,
/// computed from row/column totals so that missing cells are handled by the
/// unbalanced-totals formulas.
struct AnovaResult {
  double ssi = 0.0;  ///< between items
  double ssp = 0.0;  ///< between participants
  double sse = 0.0;  ///< residual
  double sst = 0.0;  ///< total, sum x^2 - t^2/N
  double dfi = 0.0;
  double dfp = 0.0;
  double dfe = 0.0;
  double msi = 0.0;
  double msp = 0.0;
  double mse = 0.0;
  std::size_t n_effective = 0;  ///< participant count n (columns)
  std::size_t total_present = 0;  ///< N

  /// Residual mean square is zero: the table is perfectly additive and no
  /// F ratio exists.
  [[nodiscard]] bool degenerate() const noexcept { return !(mse > 0.0); }
};

/// Throws DataError when the residual degrees of freedom are not positive.
AnovaResult anova(const DataTable& table);

struct ConfidenceInterval {
  double probability = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  [[nodiscard]] bool contains(double x) const noexcept { return lower <= x && x <= upper; }
};

/// ICC point estimate with F-based confidence intervals.
struct IccEstimate {
  std::optional<double> q_hat;  ///< unset when the ANOVA is degenerate
  double icc = 0.0;
  double f_obs = 0.0;
  double dfi = 0.0;
  double dfe = 0.0;
  std::size_t n = 0;
  std::vector<ConfidenceInterval> intervals;
  std::vector<std::string> warnings;

  [[nodiscard]] bool degenerate() const noexcept { return !q_hat.has_value(); }

  /// Interval at `probability` (matched to 1e-12), if one was computed.
  [[nodiscard]] const ConfidenceInterval* interval_at(double probability) const noexcept;
};

inline constexpr double kDefaultConfidence[] = {0.95, 0.99, 0.999};

/// Confidence interval of probability `probability` for an observed F ratio
/// with (dfi, dfe) degrees of freedom. Bounds are not clamped.
ConfidenceInterval icc_interval(double f_obs, double dfi, double dfe, double probability);

/// q_hat = max(0, msi - mse) / (n mse), icc = (msi - mse) / msi clamped to
/// [0, 1), f_obs = msi / mse. A degenerate ANOVA (mse = 0) yields icc = 1,
/// no q_hat, no intervals, and a warning.
IccEstimate icc_from_anova(const AnovaResult& a,
                           std::span<const double> conf_probs = kDefaultConfidence);

/// Adds (or returns the existing) interval at `probability`.
const ConfidenceInterval& ensure_interval(IccEstimate& estimate, double probability);

/// rho = n q / (n q + 1).
double extrapolate_icc(double q, double n);

/// q = rho / (n (1 - rho)); rho must lie in [0, 1).
double q_from_icc(double rho, double n);

/// n = rho / (q (1 - rho)); requires q > 0 and 0 < rho < 1.
double participants_needed(double q, double rho);

}  // namespace expcorr
