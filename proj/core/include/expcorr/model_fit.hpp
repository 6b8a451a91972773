#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "expcorr/anova.hpp"
#include "expcorr/data_table.hpp"

namespace expcorr {

/// A full simulation model is compared through |r|, a predictor through r^2.
enum class PredictionKind { simulation, predictor };

std::string_view to_string(PredictionKind kind);
PredictionKind parse_prediction_kind(std::string_view text);

/// Item-level model predictions, in the table's item order.
struct PredictionVector {
  std::vector<double> values;
  PredictionKind kind = PredictionKind::predictor;
};

/// Prediction file contents before alignment: one value per line, or
/// label/value pairs.
struct RawPredictions {
  std::vector<double> values;
  std::vector<std::string> labels;  ///< empty when the file has no labels
};

/// Reads a single-column or labeled two-column delimited file with an
/// optional header. Throws DataError.
RawPredictions load_predictions(std::istream& in);

/// Orders predictions like the table's items: by label when both sides carry
/// labels (label sets must match exactly), else by row order (lengths must
/// match). Throws DataError on mismatch.
PredictionVector align_predictions(const DataTable& table, const RawPredictions& raw,
                                   PredictionKind kind);

struct FitStatistic {
  double r = 0.0;
  double statistic = 0.0;  ///< |r|^c, c = 1 (simulation) or 2 (predictor)
};

/// Pearson r between item means and predictions, raised to the kind's power.
FitStatistic fit_statistic(const ItemMeans& data, const PredictionVector& prediction);

enum class Verdict { underfit, consistent, overfit };

std::string_view to_string(Verdict verdict);

inline constexpr double kDefaultAlpha = 0.01;

struct FitVerdict {
  double statistic = 0.0;
  double icc = 0.0;
  ConfidenceInterval ci;
  Verdict verdict = Verdict::consistent;
  double alpha = kDefaultAlpha;
};

/// Compares a fit statistic with the ICC interval of probability 1 - alpha.
/// Equality with a bound counts as consistent. The interval is computed from
/// the estimate's F ratio when not already present.
FitVerdict judge_fit(double statistic, const IccEstimate& icc, double alpha = kDefaultAlpha);

struct RegressionProblem;

struct SweepPoint {
  std::size_t k = 0;
  double r = 0.0;
  double statistic = 0.0;
  Verdict verdict = Verdict::consistent;
};

/// Least-squares predictors with k = k_first..k_last free parameters on a
/// synthetic regression problem, each judged against `icc`.
std::vector<SweepPoint> complexity_sweep(const RegressionProblem& problem, std::size_t k_first,
                                         std::size_t k_last, const IccEstimate& icc,
                                         double alpha = kDefaultAlpha);

}  // namespace expcorr
