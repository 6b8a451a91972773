#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "expcorr/anova.hpp"
#include "expcorr/calibration.hpp"
#include "expcorr/error.hpp"
#include "expcorr/model_fit.hpp"
#include "expcorr/resampling.hpp"
#include "expcorr/synthetic.hpp"
#include "expcorr/validity.hpp"
#include "output_file.hpp"
#include "svg_plot.hpp"

namespace expcorr::cli {

using json = nlohmann::ordered_json;

namespace {

std::string_view to_string(SeedSource source) {
  switch (source) {
    case SeedSource::flag: return "flag";
    case SeedSource::environment: return "environment";
    case SeedSource::generated: return "generated";
  }
  return "unknown";
}

Detect parse_detect(const std::string& text, const char* what) {
  if (text == "auto") return Detect::automatic;
  if (text == "yes") return Detect::yes;
  if (text == "no") return Detect::no;
  throw std::invalid_argument(std::string(what) + " must be auto, yes or no, got '" + text + "'");
}

void require_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie strictly between 0 and 1");
  }
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

json seed_json(const ResolvedSeed& seed) {
  return {{"value", seed.value}, {"source", to_string(seed.source)}};
}

json interval_json(const ConfidenceInterval& ci) {
  return {{"probability", ci.probability}, {"lower", ci.lower}, {"upper", ci.upper}};
}

json document(const char* command) {
  return {{"schema_version", kSchemaVersion}, {"tool", "ecvt"}, {"command", command}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// validate / fit pipeline

struct Pipeline {
  AnovaResult anova;
  IccEstimate icc;
  ItemMeans means;
  GroupPlan plan;
  ResamplingSeries series;
  ValidityReport validity;
};

void check_validate_options(const ValidateOptions& o) {
  for (double p : o.conf) require_probability(p, "--conf probabilities");
  require_probability(o.alpha, "--alpha");
  if (o.replicates < 2) throw std::invalid_argument("--T must be at least 2");
  if (o.target_k == 0) throw std::invalid_argument("--target-k must be positive");
}

Pipeline run_pipeline(const DataTable& table, const ValidateOptions& o, std::uint64_t seed) {
  Pipeline p;
  p.anova = anova(table);
  p.icc = icc_from_anova(p.anova, o.conf);
  if (p.icc.degenerate()) {
    throw DegenerateError(
        "residual mean square is zero: the table is constant or exactly additive, so the ICC "
        "has no confidence interval and the validity test is undefined");
  }
  ensure_interval(p.icc, 1.0 - o.alpha);
  p.means = item_means(table);
  p.plan = plan_groups(table.participants(), o.target_k);
  p.series = resample_series(table, p.plan, {o.replicates, seed, o.threads});
  p.validity = validity_test(p.series, table.participants());
  return p;
}

json table_json(const DataTable& t, const std::string& path) {
  const double cells = static_cast<double>(t.items() * t.participants());
  return {{"path", path},
          {"items", t.items()},
          {"participants", t.participants()},
          {"present_cells", t.present_count()},
          {"missing_fraction", 1.0 - static_cast<double>(t.present_count()) / cells}};
}

json anova_json(const AnovaResult& a) {
  return {{"ssi", a.ssi}, {"ssp", a.ssp}, {"sse", a.sse}, {"sst", a.sst}, {"dfi", a.dfi},
          {"dfp", a.dfp}, {"dfe", a.dfe}, {"msi", a.msi}, {"msp", a.msp}, {"mse", a.mse},
          {"n", a.n_effective}, {"N", a.total_present}};
}

json icc_json(const IccEstimate& e) {
  json intervals = json::array();
  for (const auto& ci : e.intervals) intervals.push_back(interval_json(ci));
  return {{"q_hat", e.q_hat ? json(*e.q_hat) : json(nullptr)},
          {"icc", e.icc},
          {"f_obs", e.f_obs},
          {"dfi", e.dfi},
          {"dfe", e.dfe},
          {"intervals", intervals},
          {"warnings", e.warnings}};
}

json validity_json(const Pipeline& p, const ValidateOptions& o) {
  json series = json::array();
  for (std::size_t g = 0; g < p.series.entries.size(); ++g) {
    const auto& e = p.series.entries[g];
    series.push_back({{"group_size", e.group_size},
                      {"r_mean", e.r_mean},
                      {"r_sd", e.r_sd},
                      {"r_predicted", p.validity.predicted[g]}});
  }
  const auto& v = p.validity;
  return {{"replicates", p.series.replicates},
          {"target_k", o.target_k},
          {"plan", {{"offset", p.plan.offset}, {"step", p.plan.step}, {"count", p.plan.count}}},
          {"series", series},
          {"q_opt", v.q_opt},
          {"r", v.extrapolated_r},
          {"chi2", v.chi2},
          {"df", v.df},
          {"p_value", v.p_value},
          {"alpha", o.alpha},
          {"significant", v.rejected(o.alpha)},
          {"converged", v.converged},
          {"iterations", v.iterations},
          {"warnings", v.warnings}};
}

void print_table_summary(std::ostream& out, const DataTable& t) {
  const double cells = static_cast<double>(t.items() * t.participants());
  out << "items = " << t.items() << ", participants = " << t.participants()
      << ", missing = " << fixed(100.0 * (1.0 - static_cast<double>(t.present_count()) / cells), 2)
      << "%\n";
}

void print_pipeline(std::ostream& out, const Pipeline& p, const ValidateOptions& o) {
  out << "qAV = " << fixed4(*p.icc.q_hat) << "\n";
  out << "icc = " << fixed4(p.icc.icc) << "\n";
  out << "conf =\n";
  for (const auto& ci : p.icc.intervals) {
    out << "  " << fixed4(ci.probability) << "  " << fixed4(ci.lower) << "  " << fixed4(ci.upper) << "\n";
  }
  out << "r = " << fixed4(p.validity.extrapolated_r) << "\n";
  out << "Chi2 = " << fixed4(p.validity.chi2) << "\n";
  out << "Chi2df = " << p.validity.df << "\n";
  out << "Chi2p = " << fixed4(p.validity.p_value) << "\n";
  for (const auto& w : p.icc.warnings) out << "warning: " << w << "\n";
  for (const auto& w : p.validity.warnings) out << "warning: " << w << "\n";
  if (p.validity.rejected(o.alpha)) {
    out << "validity test significant at alpha = " << fixed4(o.alpha)
        << ": the ICC is not a reliable expected correlation\n";
  } else {
    out << "validity test not significant at alpha = " << fixed4(o.alpha)
        << ": the ICC is a valid reference\n";
  }
}

std::string series_csv(const Pipeline& p) {
  std::string csv = "group_size,r_mean,r_sd,r_predicted\n";
  for (std::size_t g = 0; g < p.series.entries.size(); ++g) {
    const auto& e = p.series.entries[g];
    csv += std::to_string(e.group_size) + "," + format_real(e.r_mean) + "," + format_real(e.r_sd) + "," +
           format_real(p.validity.predicted[g]) + "\n";
  }
  return csv;
}

// Predicted and observed split-half correlation against group size.
std::string series_svg(const Pipeline& p, const std::string& title) {
  const auto& entries = p.series.entries;
  PlotSeries predicted{"predicted r", {}, {}, {}, false, true};
  PlotSeries observed{"mean observed r (+-SD)", {}, {}, {}, true, true};
  double y_min = 0.0;
  for (std::size_t g = 0; g < entries.size(); ++g) {
    const double x = static_cast<double>(entries[g].group_size);
    predicted.x.push_back(x);
    predicted.y.push_back(p.validity.predicted[g]);
    observed.x.push_back(x);
    observed.y.push_back(entries[g].r_mean);
    observed.err.push_back(entries[g].r_sd);
    y_min = std::min(y_min, 1.05 * (entries[g].r_mean - entries[g].r_sd));
  }
  const std::size_t K = entries.size();
  const double last = static_cast<double>(entries[K - 1].group_size);
  const double x_max = K >= 2 ? 2.0 * last - static_cast<double>(entries[K - 2].group_size) : last + 1.0;
  // The caption rounds chi2 to 2 decimals and p to 4, with p floored at 1e-4.
  const double chi2 = std::round(p.validity.chi2 * 100.0) / 100.0;
  const double pv = std::max(std::round(p.validity.p_value * 1e4) / 1e4, 1e-4);
  Plot plot;
  plot.title = (title.empty() ? std::string() : title + ": ") + "\xcf\x87\xc2\xb2(" +
               std::to_string(p.validity.df) + ")=" + fixed(chi2, 2) + ", p < " + fixed(pv, 4);
  plot.x_label = "Number of participants per group";
  plot.y_label = "r";
  plot.x_min = 0.0;
  plot.x_max = x_max;
  plot.y_min = y_min;
  plot.y_max = 1.0;
  plot.series = {predicted, observed};
  return render_svg(plot);
}

void write_pipeline_artifacts(const Pipeline& p, const ValidateOptions& o, std::ostream& out) {
  if (!o.outputs.csv.empty()) write_output(o.outputs.csv, series_csv(p), out);
  if (!o.outputs.plot.empty()) {
    const std::string title =
        o.title.empty() ? std::filesystem::path(o.input.path).stem().string() : o.title;
    write_output(o.outputs.plot, series_svg(p, title), out);
  }
}


DataTable load_input(const TableInput& input) { return load_table_file(input.path, input.load_options()); }

void print_seed(std::ostream& out, const ResolvedSeed& seed) {
  out << "seed = " << seed.value;
  if (seed.source != SeedSource::flag) out << " (" << to_string(seed.source) << ")";
  out << "\n";
}

// ---------------------------------------------------------------------------
// calibrate helpers

std::vector<MisfitCalibrationConfig::Problem> problem_grid(const CalibrateOptions& o) {
  std::vector<MisfitCalibrationConfig::Problem> problems;
  for (std::size_t m : o.m_values) {
    for (double q : o.q_values) problems.push_back({m, q});
  }
  return problems;
}

std::string problem_label(const MisfitCalibrationConfig::Problem& p) {
  return "m=" + std::to_string(p.m) + " q=" + fixed4(p.q);
}

Verdict verdict_of(double statistic, const ConfidenceInterval& ci) {
  if (statistic < ci.lower) return Verdict::underfit;
  if (statistic > ci.upper) return Verdict::overfit;
  return Verdict::consistent;
}

int calibrate_table1(const CalibrateOptions& o, const ResolvedSeed& seed, std::ostream& out) {
  ValidityCalibrationConfig config;
  if (o.m) config.m = *o.m;
  if (o.n) config.n = *o.n;
  if (o.q) config.q = *o.q;
  config.u_values = o.u_values;
  config.alphas = o.alphas;
  config.reps = o.reps.value_or(200);
  config.replicates = o.replicates;
  config.target_k = o.target_k;
  config.seed = seed.value;
  config.threads = o.threads;
  for (double a : config.alphas) require_probability(a, "--alphas");
  for (double u : config.u_values) {
    if (!(u >= 0.0)) throw std::invalid_argument("--u values must be nonnegative");
  }
  if (!(config.q > 0.0)) throw std::invalid_argument("--q must be positive");

  const ValidityCalibration result = run_validity_calibration(config);

  print_seed(out, seed);
  out << "rejection frequency over " << config.reps << " runs (m = " << config.m << ", n = " << config.n
      << ", q = " << fixed4(config.q) << ", T = " << config.replicates << ")\n";
  out << "alpha   ";
  for (double u : config.u_values) out << "  u=" << fixed4(u);
  out << "\n";
  for (std::size_t a = 0; a < config.alphas.size(); ++a) {
    out << fixed4(config.alphas[a]) << "  ";
    for (std::size_t u = 0; u < config.u_values.size(); ++u) out << "    " << fixed4(result.rejection[a][u]);
    out << "\n";
  }

  if (!o.outputs.json.empty()) {
    json doc = document("calibrate");
    doc["study"] = "table1";
    doc["seed"] = seed_json(seed);
    doc["config"] = {{"m", config.m},           {"n", config.n},
                     {"q", config.q},           {"u_values", config.u_values},
                     {"alphas", config.alphas}, {"reps", config.reps},
                     {"replicates", config.replicates}, {"target_k", config.target_k}};
    doc["rejection"] = result.rejection;
    doc["p_values"] = result.p_values;
    write_output(o.outputs.json, dump(doc), out);
  }
  if (!o.outputs.csv.empty()) {
    std::string csv = "alpha,u,rejections,reps,frequency\n";
    for (std::size_t a = 0; a < config.alphas.size(); ++a) {
      for (std::size_t u = 0; u < config.u_values.size(); ++u) {
        const auto hits = static_cast<std::size_t>(std::lround(result.rejection[a][u] * static_cast<double>(config.reps)));
        csv += format_real(config.alphas[a]) + "," + format_real(config.u_values[u]) + "," +
               std::to_string(hits) + "," + std::to_string(config.reps) + "," +
               format_real(result.rejection[a][u]) + "\n";
      }
    }
    write_output(o.outputs.csv, csv, out);
  }
  if (!o.outputs.plot.empty()) {
    // Empirical CDF of p-values per u; uniform p-values follow the diagonal.
    Plot plot;
    plot.title = "Validity test p-values (" + std::to_string(config.reps) + " runs)";
    plot.x_label = "p";
    plot.y_label = "fraction of runs with p-value <= p";
    plot.x_min = 0.0;
    plot.x_max = 1.0;
    plot.y_min = 0.0;
    plot.y_max = 1.0;
    plot.series.push_back({"uniform", {0.0, 1.0}, {0.0, 1.0}, {}, true, false});
    for (std::size_t u = 0; u < config.u_values.size(); ++u) {
      std::vector<double> ps = result.p_values[u];
      std::sort(ps.begin(), ps.end());
      PlotSeries s{"u = " + fixed4(config.u_values[u]), {0.0}, {0.0}, {}, false, false};
      for (std::size_t i = 0; i < ps.size(); ++i) {
        s.x.push_back(ps[i]);
        s.y.push_back(static_cast<double>(i + 1) / static_cast<double>(ps.size()));
      }
      s.x.push_back(1.0);
      s.y.push_back(1.0);
      plot.series.push_back(std::move(s));
    }
    write_output(o.outputs.plot, render_svg(plot), out);
  }
  return kExitOk;
}

int calibrate_misfit(const CalibrateOptions& o, const ResolvedSeed& seed, bool sweep, std::ostream& out) {
  MisfitCalibrationConfig config;
  config.problems = problem_grid(o);
  if (o.n) config.n = *o.n;
  config.k0 = o.k0;
  config.k_max = o.k_max;
  config.alpha = o.alpha;
  config.reps = o.reps.value_or(sweep ? 1 : 200);
  config.seed = seed.value;
  config.threads = o.threads;
  require_probability(config.alpha, "--alpha");
  if (config.problems.empty()) throw std::invalid_argument("no (m, q) problems requested");

  const MisfitCalibration result = run_misfit_calibration(config);
  const std::size_t k0_index = result.curves.front().index_of(config.k0);

  print_seed(out, seed);
  out << (sweep ? "complexity sweep" : "misfit frequency") << " over " << config.reps
      << " runs (n = " << config.n << ", k0 = " << config.k0 << ", k = " << config.k_first << ".."
      << config.k_max << ", alpha = " << fixed4(config.alpha) << ")\n";
  if (sweep) {
    for (const auto& curve : result.curves) {
      out << problem_label(curve.problem) << ": icc = " << fixed4(curve.first_icc) << ", "
          << fixed4(curve.first_ci.probability) << " CI [" << fixed4(curve.first_ci.lower) << ", "
          << fixed4(curve.first_ci.upper) << "]\n";
      out << "   k  statistic  verdict\n";
      for (std::size_t i = 0; i < curve.k.size(); ++i) {
        char line[64];
        std::snprintf(line, sizeof line, "%4zu  %s  ", curve.k[i], fixed4(curve.first_statistic[i]).c_str());
        out << line << to_string(verdict_of(curve.first_statistic[i], curve.first_ci)) << "\n";
      }
    }
  } else {
    out << "at k = " << config.k0 << ":\n";
    out << "              ";
    for (const auto& curve : result.curves) out << "  " << problem_label(curve.problem);
    out << "\n";
    auto row = [&](const char* name, auto value) {
      char head[16];
      std::snprintf(head, sizeof head, "%-12s", name);
      out << head;
      for (const auto& curve : result.curves) {
        const std::string label = problem_label(curve.problem);
        const std::string cell = value(curve);
        out << "  " << std::string(label.size() - std::min(label.size(), cell.size()), ' ') << cell;
      }
      out << "\n";
    };
    row("under-fits", [&](const MisfitCurve& c) { return fixed4(c.underfit[k0_index]); });
    row("over-fits", [&](const MisfitCurve& c) { return fixed4(c.overfit[k0_index]); });
    row("total", [&](const MisfitCurve& c) { return fixed4(c.total(k0_index)); });
    row("best k", [&](const MisfitCurve& c) { return std::to_string(c.best_complexity()); });
  }

  if (!o.outputs.json.empty()) {
    json doc = document("calibrate");
    doc["study"] = sweep ? "sweep" : "table2";
    doc["seed"] = seed_json(seed);
    json problems = json::array();
    for (const auto& p : config.problems) problems.push_back({{"m", p.m}, {"q", p.q}});
    doc["config"] = {{"problems", problems}, {"n", config.n},         {"k0", config.k0},
                     {"k_first", config.k_first}, {"k_max", config.k_max}, {"alpha", config.alpha},
                     {"reps", config.reps}};
    json curves = json::array();
    for (const auto& c : result.curves) {
      json verdicts = json::array();
      for (double s : c.first_statistic) verdicts.push_back(to_string(verdict_of(s, c.first_ci)));
      curves.push_back({{"m", c.problem.m},
                        {"q", c.problem.q},
                        {"k", c.k},
                        {"underfit", c.underfit},
                        {"overfit", c.overfit},
                        {"best_k", c.best_complexity()},
                        {"at_k0", {{"underfit", c.underfit[k0_index]},
                                   {"overfit", c.overfit[k0_index]},
                                   {"total", c.total(k0_index)}}},
                        {"first_run", {{"icc", c.first_icc},
                                       {"ci", interval_json(c.first_ci)},
                                       {"statistic", c.first_statistic},
                                       {"verdict", verdicts}}}});
    }
    doc["curves"] = curves;
    write_output(o.outputs.json, dump(doc), out);
  }
  if (!o.outputs.csv.empty()) {
    std::string csv = "m,q,k,underfit,overfit,total,first_statistic,first_lower,first_upper,first_verdict\n";
    for (const auto& c : result.curves) {
      for (std::size_t i = 0; i < c.k.size(); ++i) {
        csv += std::to_string(c.problem.m) + "," + format_real(c.problem.q) + "," + std::to_string(c.k[i]) +
               "," + format_real(c.underfit[i]) + "," + format_real(c.overfit[i]) + "," +
               format_real(c.total(i)) + "," + format_real(c.first_statistic[i]) + "," +
               format_real(c.first_ci.lower) + "," + format_real(c.first_ci.upper) + "," +
               std::string(to_string(verdict_of(c.first_statistic[i], c.first_ci))) + "\n";
      }
    }
    write_output(o.outputs.csv, csv, out);
  }
  if (!o.outputs.plot.empty()) {
    Plot plot;
    plot.x_label = "Model complexity (free parameters)";
    plot.x_min = 0.0;
    plot.x_max = static_cast<double>(config.k_max);
    plot.y_min = 0.0;
    plot.y_max = 1.0;
    if (sweep) {
      plot.title = "Predictor r\xc2\xb2 against complexity (first run)";
      plot.y_label = "r\xc2\xb2";
      for (const auto& c : result.curves) {
        PlotSeries s{problem_label(c.problem), {}, c.first_statistic, {}, false, false};
        for (std::size_t k : c.k) s.x.push_back(static_cast<double>(k));
        plot.series.push_back(std::move(s));
      }
      if (result.curves.size() == 1) {
        const auto& ci = result.curves.front().first_ci;
        plot.band = PlotBand{ci.lower, ci.upper, "ICC " + fixed4(ci.probability) + " CI"};
      }
    } else {
      plot.title = "Misfit detection frequency (" + std::to_string(config.reps) + " runs)";
      plot.y_label = "frequency";
      for (const auto& c : result.curves) {
        PlotSeries under{"under-fit " + problem_label(c.problem), {}, c.underfit, {}, false, false};
        PlotSeries over{"over-fit " + problem_label(c.problem), {}, c.overfit, {}, true, false};
        for (std::size_t k : c.k) {
          under.x.push_back(static_cast<double>(k));
          over.x.push_back(static_cast<double>(k));
        }
        plot.series.push_back(std::move(under));
        plot.series.push_back(std::move(over));
      }
    }
    write_output(o.outputs.plot, render_svg(plot), out);
  }
  return kExitOk;
}

}  // namespace

std::string fixed4(double value) { return fixed(value, 4); }

ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return {*flag, SeedSource::flag};
  if (const char* env = std::getenv("ECVT_SEED"); env != nullptr && *env != '\0') {
    const std::string text(env);
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(text, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || text.front() == '-') {
      throw std::invalid_argument("ECVT_SEED must be an unsigned 64-bit integer, got '" + text + "'");
    }
    return {static_cast<std::uint64_t>(value), SeedSource::environment};
  }
  std::random_device device;
  const std::uint64_t value = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  return {value, SeedSource::generated};
}

LoadOptions TableInput::load_options() const {
  LoadOptions options;
  if (!missing.empty()) {
    if (const auto code = parse_real(missing)) {
      options.missing_code = *code;
    } else {
      options.missing_token = missing;
    }
  }
  if (delimiter == "tab" || delimiter == "\\t") {
    options.delimiter = '\t';
  } else if (delimiter == "space") {
    options.delimiter = ' ';
  } else if (delimiter.size() == 1) {
    options.delimiter = delimiter[0];
  } else if (!delimiter.empty()) {
    throw std::invalid_argument("--delimiter must be a single character, 'tab' or 'space'");
  }
  options.header = parse_detect(header, "--header");
  options.row_labels = parse_detect(labels, "--labels");
  return options;
}

int cmd_validate(const ValidateOptions& o, std::ostream& out, std::ostream&) {
  check_validate_options(o);
  const ResolvedSeed seed = resolve_seed(o.seed);
  const DataTable table = load_input(o.input);
  const Pipeline p = run_pipeline(table, o, seed.value);

  print_seed(out, seed);
  print_table_summary(out, table);
  print_pipeline(out, p, o);

  if (!o.outputs.json.empty()) {
    json doc = document("validate");
    doc["seed"] = seed_json(seed);
    doc["table"] = table_json(table, o.input.path);
    doc["anova"] = anova_json(p.anova);
    doc["icc"] = icc_json(p.icc);
    doc["validity"] = validity_json(p, o);
    doc["item_means"] = p.means.means;
    write_output(o.outputs.json, dump(doc), out);
  }
  write_pipeline_artifacts(p, o, out);
  return p.validity.rejected(o.alpha) ? kExitRejected : kExitOk;
}

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  const ValidateOptions& v = o.validate;
  check_validate_options(v);
  const PredictionKind kind = parse_prediction_kind(o.kind);
  const ResolvedSeed seed = resolve_seed(v.seed);
  const DataTable table = load_input(v.input);
  std::ifstream pred_in(o.predictions);
  if (!pred_in) throw DataError("cannot open predictions file " + o.predictions);
  const PredictionVector prediction = align_predictions(table, load_predictions(pred_in), kind);
  const Pipeline p = run_pipeline(table, v, seed.value);
  const bool rejected = p.validity.rejected(v.alpha);

  print_seed(out, seed);
  print_table_summary(out, table);
  print_pipeline(out, p, v);

  json doc = document("fit");
  doc["seed"] = seed_json(seed);
  doc["table"] = table_json(table, v.input.path);
  doc["predictions"] = {{"path", o.predictions}, {"kind", to_string(kind)}};
  doc["anova"] = anova_json(p.anova);
  doc["icc"] = icc_json(p.icc);
  doc["validity"] = validity_json(p, v);
  doc["forced"] = o.force;

  if (rejected && !o.force) {
    err << "error: the validity test rejected the additive model (p = " << fixed4(p.validity.p_value)
        << " < alpha = " << fixed4(v.alpha)
        << "), so the ICC is not a reliable expected correlation; pass --force to judge the fit anyway\n";
    doc["fit"] = nullptr;
    doc["refused"] = true;
  } else {
    const FitStatistic stat = fit_statistic(p.means, prediction);
    const FitVerdict verdict = judge_fit(stat.statistic, p.icc, v.alpha);
    out << "r = " << fixed4(stat.r) << "\n";
    out << "statistic = " << fixed4(stat.statistic)
        << (kind == PredictionKind::predictor ? " (r^2, predictor)" : " (|r|, simulation)") << "\n";
    out << "icc = " << fixed4(verdict.icc) << "\n";
    out << fixed4(verdict.ci.probability) << " CI = [" << fixed4(verdict.ci.lower) << ", "
        << fixed4(verdict.ci.upper) << "]\n";
    out << "verdict = " << to_string(verdict.verdict) << "\n";
    if (rejected) out << "warning: verdict forced although the validity test was significant\n";
    doc["fit"] = {{"r", stat.r},
                  {"statistic", stat.statistic},
                  {"icc", verdict.icc},
                  {"ci", interval_json(verdict.ci)},
                  {"alpha", verdict.alpha},
                  {"verdict", to_string(verdict.verdict)}};
    doc["refused"] = false;
  }
  if (!v.outputs.json.empty()) write_output(v.outputs.json, dump(doc), out);
  write_pipeline_artifacts(p, v, out);
  return rejected ? kExitRejected : kExitOk;
}

int cmd_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  if (!(o.q > 0.0)) throw std::invalid_argument("--q must be positive");
  const ResolvedSeed seed = resolve_seed(o.seed);
  std::ostream& info = o.out == "-" ? err : out;
  json doc = document("synth");
  doc["model"] = o.model;
  doc["seed"] = seed_json(seed);
  doc["output"] = o.out;

  std::ostringstream table_text;
  if (o.model == "eq1") {
    AdditiveSpec spec = AdditiveSpec::from_q(o.m, o.n, o.q, seed.value);
    spec.mu = o.mu;
    spec.sigma_alpha = o.sigma_alpha;
    write_table(table_text, gen_additive(spec));
    doc["parameters"] = {{"m", spec.m},
                         {"n", spec.n},
                         {"mu", spec.mu},
                         {"sigma_alpha", spec.sigma_alpha},
                         {"sigma_beta", spec.sigma_beta},
                         {"sigma_eps", spec.sigma_eps},
                         {"q", o.q}};
    doc["population_icc"] = spec.population_icc(static_cast<double>(spec.n));
  } else if (o.model == "eq22") {
    if (!(o.u >= 0.0)) throw std::invalid_argument("--u must be nonnegative");
    SensitivitySpec spec = SensitivitySpec::from_qu(o.m, o.n, o.q, o.u, seed.value);
    spec.mu = o.mu;
    spec.sigma_alpha = o.sigma_alpha;
    write_table(table_text, gen_sensitivity(spec));
    doc["parameters"] = {{"m", spec.m},
                         {"n", spec.n},
                         {"mu", spec.mu},
                         {"sigma_alpha", spec.sigma_alpha},
                         {"gamma_mean", spec.gamma_mean},
                         {"sigma_gamma", spec.sigma_gamma},
                         {"sigma_eps", spec.sigma_eps},
                         {"q", o.q},
                         {"u", o.u}};
  } else if (o.model == "regression") {
    const RegressionProblem problem = gen_regression_problem(o.m, o.n, o.k0, o.k_max, o.q, seed.value);
    write_table(table_text, problem.table);
    doc["parameters"] = {{"m", problem.m},         {"n", problem.n},   {"k0", problem.k0},
                         {"k_max", problem.k_max}, {"q", o.q},         {"sigma_eps", problem.sigma_eps},
                         {"mu", problem.mu}};
    if (o.predictor_k != 0) {
      if (o.predictions.empty()) throw std::invalid_argument("--predictor needs --predictions <path>");
      const BuiltPredictor built = build_predictor(problem, o.predictor_k);
      std::string text;
      for (double value : built.prediction.values) text += format_real(value) + "\n";
      write_output(o.predictions, text, out);
      for (const auto& w : built.warnings) info << "warning: " << w << "\n";
      doc["predictor"] = {{"k", o.predictor_k}, {"path", o.predictions}, {"warnings", built.warnings}};
    }
  } else {
    throw std::invalid_argument("unknown synthetic model '" + o.model + "'");
  }

  write_output(o.out, table_text.str(), out);
  print_seed(info, seed);
  if (!o.json.empty()) write_output(o.json, dump(doc), out);
  return kExitOk;
}

int cmd_calibrate(const CalibrateOptions& o, std::ostream& out, std::ostream&) {
  if (o.reps && *o.reps == 0) throw std::invalid_argument("--reps must be at least 1");
  const ResolvedSeed seed = resolve_seed(o.seed);
  if (o.study == "table1") return calibrate_table1(o, seed, out);
  if (o.study == "table2") return calibrate_misfit(o, seed, false, out);
  if (o.study == "sweep") return calibrate_misfit(o, seed, true, out);
  throw std::invalid_argument("unknown calibration study '" + o.study + "'");
}

}  // namespace expcorr::cli
