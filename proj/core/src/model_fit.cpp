#include "expcorr/model_fit.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>

#include "expcorr/error.hpp"
#include "expcorr/synthetic.hpp"

namespace expcorr {

std::string_view to_string(PredictionKind kind) {
  return kind == PredictionKind::simulation ? "simulation" : "predictor";
}

PredictionKind parse_prediction_kind(std::string_view text) {
  if (text == "simulation") return PredictionKind::simulation;
  if (text == "predictor") return PredictionKind::predictor;
  throw DomainError("unknown prediction kind '" + std::string(text) + "' (expected simulation or predictor)");
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::underfit:
      return "underfit";
    case Verdict::overfit:
      return "overfit";
    case Verdict::consistent:
      break;
  }
  return "consistent";
}

RawPredictions load_predictions(std::istream& in) {
  const TextGrid grid = read_delimited(in);
  RawPredictions raw;
  if (grid.rows.empty()) throw DataError("prediction file is empty");
  const std::size_t width = grid.rows.front().size();
  if (width != 1 && width != 2) {
    throw DataError("prediction file must have one column (values) or two (label, value); found " +
                    std::to_string(width));
  }
  const std::size_t value_col = width - 1;
  std::size_t first = 0;
  if (!parse_real(grid.rows.front()[value_col])) first = 1;  // header row
  for (std::size_t r = first; r < grid.rows.size(); ++r) {
    const auto& row = grid.rows[r];
    if (row.size() != width) throw DataError("ragged prediction file at line " + std::to_string(r + 1));
    const auto v = parse_real(row[value_col]);
    if (!v) {
      throw DataError("non-numeric prediction '" + row[value_col] + "' at line " + std::to_string(r + 1));
    }
    raw.values.push_back(*v);
    if (width == 2) raw.labels.push_back(row[0]);
  }
  return raw;
}

PredictionVector align_predictions(const DataTable& table, const RawPredictions& raw, PredictionKind kind) {
  PredictionVector out{{}, kind};
  const auto& items = table.item_labels();
  if (!items.empty() && !raw.labels.empty()) {
    std::map<std::string, double> by_label;
    for (std::size_t i = 0; i < raw.labels.size(); ++i) {
      if (!by_label.emplace(raw.labels[i], raw.values[i]).second) {
        throw DataError("duplicate prediction label '" + raw.labels[i] + "'");
      }
    }
    if (by_label.size() != items.size()) {
      throw DataError("prediction labels do not match the table's items (" + std::to_string(by_label.size()) +
                      " labels for " + std::to_string(items.size()) + " items)");
    }
    out.values.reserve(items.size());
    for (const auto& label : items) {
      const auto it = by_label.find(label);
      if (it == by_label.end()) throw DataError("no prediction for item '" + label + "'");
      out.values.push_back(it->second);
    }
    return out;
  }
  if (raw.values.size() != table.items()) {
    throw DataError("prediction count " + std::to_string(raw.values.size()) + " does not match " +
                    std::to_string(table.items()) + " items");
  }
  out.values = raw.values;
  return out;
}

FitStatistic fit_statistic(const ItemMeans& data, const PredictionVector& prediction) {
  if (prediction.values.size() != data.means.size()) {
    throw DataError("prediction vector length does not match the item count");
  }
  for (double v : prediction.values) {
    if (!std::isfinite(v)) throw DataError("prediction vector contains a non-finite value");
  }
  FitStatistic out;
  out.r = pearson_r(data.means, prediction.values);
  out.statistic = prediction.kind == PredictionKind::simulation ? std::abs(out.r) : out.r * out.r;
  return out;
}

FitVerdict judge_fit(double statistic, const IccEstimate& icc, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0,1)");
  const double probability = 1.0 - alpha;
  FitVerdict v;
  v.statistic = statistic;
  v.icc = icc.icc;
  v.alpha = alpha;
  if (const auto* ci = icc.interval_at(probability)) {
    v.ci = *ci;
  } else {
    if (icc.degenerate() || !(icc.f_obs > 0.0)) {
      throw DegenerateError("no ICC interval is available for degenerate data");
    }
    v.ci = icc_interval(icc.f_obs, icc.dfi, icc.dfe, probability);
  }
  if (statistic < v.ci.lower) {
    v.verdict = Verdict::underfit;
  } else if (statistic > v.ci.upper) {
    v.verdict = Verdict::overfit;
  } else {
    v.verdict = Verdict::consistent;
  }
  return v;
}

std::vector<SweepPoint> complexity_sweep(const RegressionProblem& problem, std::size_t k_first,
                                         std::size_t k_last, const IccEstimate& icc, double alpha) {
  if (k_first < 2 || k_last > problem.k_max || k_first > k_last) {
    throw DomainError("complexity range must lie within [2, " + std::to_string(problem.k_max) + "]");
  }
  const ItemMeans means = item_means(problem.table);
  const NestedPredictors predictors(problem);
  std::vector<SweepPoint> out;
  out.reserve(k_last - k_first + 1);
  for (std::size_t k = k_first; k <= k_last; ++k) {
    const Eigen::VectorXd b = predictors.predict(k);
    PredictionVector pv{std::vector<double>(b.data(), b.data() + b.size()), PredictionKind::predictor};
    const FitStatistic fs = fit_statistic(means, pv);
    out.push_back({k, fs.r, fs.statistic, judge_fit(fs.statistic, icc, alpha).verdict});
  }
  return out;
}

}  // namespace expcorr
