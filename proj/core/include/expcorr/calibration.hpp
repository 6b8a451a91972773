#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "expcorr/model_fit.hpp"

namespace expcorr {

/// Repeated validity tests on participant-sensitivity data: one p-value per
/// (u, replication), and rejection frequencies per (alpha, u).
struct ValidityCalibrationConfig {
  std::size_t m = 360;
  std::size_t n = 120;
  double q = 1.0 / 16.0;
  std::vector<double> u_values{0.0, 1.0 / 36.0, 1.0 / 16.0, 1.0 / 4.0};
  std::vector<double> alphas{0.01, 0.05};
  std::size_t reps = 200;
  std::size_t replicates = 500;
  std::size_t target_k = 12;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct ValidityCalibration {
  ValidityCalibrationConfig config;
  std::vector<std::vector<double>> p_values;   ///< [u][rep]
  std::vector<std::vector<double>> rejection;  ///< [alpha][u]
};

ValidityCalibration run_validity_calibration(const ValidityCalibrationConfig& config);

/// Repeated complexity sweeps on synthetic regression problems.
struct MisfitCalibrationConfig {
  struct Problem {
    std::size_t m;
    double q;
  };
  std::vector<Problem> problems{{61, 0.25}, {61, 1.0 / 16.0}, {610, 0.25}, {610, 1.0 / 16.0}};
  std::size_t n = 40;
  std::size_t k0 = 20;
  std::size_t k_max = 60;
  std::size_t k_first = 2;
  double alpha = 0.01;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct MisfitCurve {
  MisfitCalibrationConfig::Problem problem{};
  std::vector<std::size_t> k;
  std::vector<double> underfit;  ///< detection frequency per k
  std::vector<double> overfit;
  /// Statistic per k and ICC interval of the first replication (one-run view).
  std::vector<double> first_statistic;
  double first_icc = 0.0;
  ConfidenceInterval first_ci;

  [[nodiscard]] double total(std::size_t index) const { return underfit[index] + overfit[index]; }
  /// Index into `k` of the given complexity.
  [[nodiscard]] std::size_t index_of(std::size_t complexity) const;
  /// Complexity with the smallest total misfit frequency (first on ties).
  [[nodiscard]] std::size_t best_complexity() const;
};

struct MisfitCalibration {
  MisfitCalibrationConfig config;
  std::vector<MisfitCurve> curves;
};

MisfitCalibration run_misfit_calibration(const MisfitCalibrationConfig& config);

/// Central acceptance region [lo, hi] for a Binomial(trials, p) count holding
/// at least `coverage` probability (equal tails).
struct CountRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};
CountRange binomial_acceptance(std::size_t trials, double p, double coverage);

}  // namespace expcorr
