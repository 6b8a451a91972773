#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "expcorr/resampling.hpp"

namespace expcorr {

/// T * sum_g ((r_mean_g - rho_g(q)) / r_sd_g)^2 with rho_g(q) = n_g q / (n_g q + 1).
/// Throws DegenerateError when any r_sd_g is zero.
double chi2_statistic(const ResamplingSeries& series, double q);

inline constexpr double kFitTolerance = 1e-9;
inline constexpr int kFitMaxIterations = 30;

struct QFit {
  double q = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;
};

/// Minimizes chi2_statistic over q by Newton-Raphson on its derivative,
/// from the 1/s^2-weighted mean of the per-size q estimates. Stops when
/// |dq| <= 1e-9 |q| or after 30 iterations (then converged = false and the
/// last iterate is returned). q is not constrained to be positive.
QFit fit_q(const ResamplingSeries& series);

struct ValidityReport {
  double q_opt = 0.0;
  double chi2 = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  std::vector<double> predicted;  ///< rho_g at q_opt, one per series entry
  double extrapolated_r = 0.0;    ///< rho at q_opt for the full participant count
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> warnings;

  [[nodiscard]] bool rejected(double alpha) const noexcept { return p_value < alpha; }
};

/// Fits q, evaluates the chi-square(K) statistic and its upper-tail p-value,
/// and extrapolates the correlation to `participants`.
ValidityReport validity_test(const ResamplingSeries& series, std::size_t participants);

}  // namespace expcorr
