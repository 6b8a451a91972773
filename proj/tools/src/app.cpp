#include "app.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <new>
#include <stdexcept>

#include "commands.hpp"
#include "expcorr/error.hpp"

#ifndef ECVT_VERSION
#define ECVT_VERSION "0.0.0"
#endif

namespace expcorr::cli {

namespace {

void add_table_input(CLI::App& cmd, TableInput& input) {
  cmd.add_option("table", input.path, "Items x participants data table (delimited text)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd.add_option("--missing", input.missing,
                 "Missing-cell code: a number, or a text token (NA and empty fields are always missing)");
  cmd.add_option("--delimiter", input.delimiter, "Field delimiter: one character, 'tab' or 'space' (default: detect)");
  cmd.add_option("--header", input.header, "First row holds participant labels")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
  cmd.add_option("--labels", input.labels, "First column holds item labels")
      ->check(CLI::IsMember({"auto", "yes", "no"}))
      ->capture_default_str();
}

void add_outputs(CLI::App& cmd, Outputs& outputs, const char* plot_help, const char* csv_help) {
  cmd.add_option("--json", outputs.json, "Write the JSON report to this path ('-' for stdout)");
  cmd.add_option("--plot", outputs.plot, plot_help);
  cmd.add_option("--csv", outputs.csv, csv_help);
}

void add_seed(CLI::App& cmd, std::optional<std::uint64_t>& seed) {
  cmd.add_option("--seed", seed, "Random seed (default: $ECVT_SEED, else generated and reported)");
}

void add_threads(CLI::App& cmd, unsigned& threads) {
  cmd.add_option("--threads", threads, "Worker threads, 0 = all cores; results do not depend on it")
      ->capture_default_str();
}

void add_validation_flags(CLI::App& cmd, ValidateOptions& o) {
  add_table_input(cmd, o.input);
  cmd.add_option("--conf", o.conf, "ICC confidence probabilities, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  cmd.add_option("--alpha", o.alpha, "Significance level of the validity test and fit judgment")
      ->capture_default_str();
  cmd.add_option("--T", o.replicates, "Resampling replicates per group size")->capture_default_str();
  cmd.add_option("--target-k", o.target_k, "Approximate number of group sizes")->capture_default_str();
  add_seed(cmd, o.seed);
  add_threads(cmd, o.threads);
  cmd.add_option("--title", o.title, "Plot title (default: table file name)");
  add_outputs(cmd, o.outputs, "Write the correlation fit plot (SVG)",
              "Write the resampling series (group size, mean r, SD, predicted r) as CSV");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected correlation validity test: ICC statistics, additive-model validity test, "
               "and model misfit detection for item x participant data"};
  app.name("ecvt");
  app.set_version_flag("--version", ECVT_VERSION);
  app.require_subcommand(1);

  ValidateOptions validate;
  auto* validate_cmd = app.add_subcommand("validate", "Estimate the ICC and test the additive model");
  add_validation_flags(*validate_cmd, validate);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Judge item-level model predictions against the ICC interval");
  add_validation_flags(*fit_cmd, fit.validate);
  fit_cmd->add_option("predictions", fit.predictions, "One prediction per item, optionally labeled")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--kind", fit.kind, "simulation (|r|) or predictor (r^2)")
      ->required()
      ->check(CLI::IsMember({"simulation", "predictor"}));
  fit_cmd->add_flag("--force", fit.force, "Judge the fit even when the validity test is significant");

  SynthOptions eq1_opts, eq22_opts, regression_opts;
  eq1_opts.model = "eq1";
  eq22_opts.model = "eq22";
  eq22_opts.u = 1.0 / 36.0;
  regression_opts.model = "regression";
  regression_opts.m = 610;
  regression_opts.n = 40;
  regression_opts.q = 0.25;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data tables");
  synth_cmd->require_subcommand(1);
  auto add_synth_common = [&](CLI::App& cmd, SynthOptions& s) {
    cmd.add_option("--m", s.m, "Items")->capture_default_str();
    cmd.add_option("--n", s.n, "Participants")->capture_default_str();
    cmd.add_option("--q", s.q, "Item-effect to noise variance ratio")->capture_default_str();
    cmd.add_option("--out", s.out, "Output table path ('-' for stdout)")->capture_default_str();
    cmd.add_option("--json", s.json, "Write generation metadata as JSON");
    add_seed(cmd, s.seed);
  };
  auto* eq1 = synth_cmd->add_subcommand("eq1", "Additive model: mu + participant + item + noise");
  add_synth_common(*eq1, eq1_opts);
  eq1->add_option("--mu", eq1_opts.mu, "Grand mean")->capture_default_str();
  eq1->add_option("--sigma-alpha", eq1_opts.sigma_alpha, "Participant-effect SD")->capture_default_str();
  auto* eq22 = synth_cmd->add_subcommand("eq22", "Participant-sensitivity model");
  add_synth_common(*eq22, eq22_opts);
  eq22->add_option("--u", eq22_opts.u, "Sensitivity to noise variance ratio")->capture_default_str();
  eq22->add_option("--mu", eq22_opts.mu, "Grand mean")->capture_default_str();
  eq22->add_option("--sigma-alpha", eq22_opts.sigma_alpha, "Participant-effect SD")->capture_default_str();
  auto* regression =
      synth_cmd->add_subcommand("regression", "Regression test problem with k0 generating parameters");
  add_synth_common(*regression, regression_opts);
  regression->add_option("--k0", regression_opts.k0, "Generating parameter count")->capture_default_str();
  regression->add_option("--kmax", regression_opts.k_max, "Largest model complexity")->capture_default_str();
  regression->add_option("--predictor", regression_opts.predictor_k,
                         "Also write the least-squares predictor with this many parameters");
  regression->add_option("--predictions", regression_opts.predictions, "Path for the --predictor output");

  CalibrateOptions calibrate;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Repeated simulation studies of the test's error rates");
  calibrate_cmd->require_subcommand(1);
  auto add_calibrate_common = [&](CLI::App& cmd) {
    cmd.add_option("--reps", calibrate.reps, "Independent runs per condition");
    add_seed(cmd, calibrate.seed);
    add_threads(cmd, calibrate.threads);
    add_outputs(cmd, calibrate.outputs, "Write a summary plot (SVG)", "Write the full results as CSV");
  };
  auto* table1 = calibrate_cmd->add_subcommand("table1", "Validity test rejection rates on sensitivity-model data (default 200 runs)");
  add_calibrate_common(*table1);
  table1->add_option("--m", calibrate.m, "Items (default 360)");
  table1->add_option("--n", calibrate.n, "Participants (default 120)");
  table1->add_option("--q", calibrate.q, "q ratio (default 0.0625)");
  table1->add_option("--u", calibrate.u_values, "Sensitivity ratios u, comma separated")->delimiter(',')->capture_default_str();
  table1->add_option("--alphas", calibrate.alphas, "Significance levels, comma separated")->delimiter(',')->capture_default_str();
  table1->add_option("--T", calibrate.replicates, "Resampling replicates per group size")->capture_default_str();
  table1->add_option("--target-k", calibrate.target_k, "Approximate number of group sizes")->capture_default_str();
  auto add_misfit = [&](CLI::App& cmd) {
    add_calibrate_common(cmd);
    cmd.add_option("--m", calibrate.m_values, "Item counts, comma separated")->delimiter(',')->capture_default_str();
    cmd.add_option("--q", calibrate.q_values, "q ratios, comma separated")->delimiter(',')->capture_default_str();
    cmd.add_option("--n", calibrate.n, "Participants (default 40)");
    cmd.add_option("--k0", calibrate.k0, "Generating parameter count")->capture_default_str();
    cmd.add_option("--kmax", calibrate.k_max, "Largest model complexity")->capture_default_str();
    cmd.add_option("--alpha", calibrate.alpha, "Risk of the ICC interval")->capture_default_str();
  };
  auto* table2 = calibrate_cmd->add_subcommand("table2", "Misfit detection frequency against complexity (default 200 runs)");
  add_misfit(*table2);
  auto* sweep = calibrate_cmd->add_subcommand("sweep", "Fit statistic against complexity for single problems (default 1 run)");
  add_misfit(*sweep);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*validate_cmd) return cmd_validate(validate, out, err);
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*eq1) return cmd_synth(eq1_opts, out, err);
    if (*eq22) return cmd_synth(eq22_opts, out, err);
    if (*regression) return cmd_synth(regression_opts, out, err);
    if (*calibrate_cmd) {
      calibrate.study = calibrate_cmd->get_subcommands().front()->get_name();
      return cmd_calibrate(calibrate, out, err);
    }
  } catch (const DegenerateError& e) {
    err << "error: degenerate data: " << e.what() << "\n";
    return kExitError;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace expcorr::cli
