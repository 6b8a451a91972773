#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "expcorr/data_table.hpp"

namespace expcorr::cli {

inline constexpr int kSchemaVersion = 1;

/// Exit statuses shared by every command.
enum ExitStatus : int { kExitOk = 0, kExitError = 1, kExitRejected = 2 };

/// Where a seed came from; reported next to the seed itself.
enum class SeedSource { flag, environment, generated };

struct ResolvedSeed {
  std::uint64_t value = 0;
  SeedSource source = SeedSource::generated;
};

/// --seed wins, then the ECVT_SEED environment variable, then a fresh
/// random value. Throws std::invalid_argument on a malformed ECVT_SEED.
ResolvedSeed resolve_seed(std::optional<std::uint64_t> flag);

struct Outputs {
  std::string json;  ///< empty = none
  std::string plot;
  std::string csv;
};

struct TableInput {
  std::string path;
  std::string missing;  ///< numeric code or textual token; empty = NA/empty only
  std::string delimiter;  ///< "", ",", ";", "tab", "space" or any single character
  std::string header = "auto";
  std::string labels = "auto";

  [[nodiscard]] LoadOptions load_options() const;
};

struct ValidateOptions {
  TableInput input;
  std::vector<double> conf{0.95, 0.99, 0.999};
  double alpha = 0.01;
  std::size_t replicates = 500;
  std::size_t target_k = 12;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string title;
  Outputs outputs;
};

struct FitOptions {
  ValidateOptions validate;
  std::string predictions;
  std::string kind;
  bool force = false;
};

struct SynthOptions {
  std::string model;  ///< eq1, eq22 or regression
  std::size_t m = 360;
  std::size_t n = 120;
  double q = 1.0 / 16.0;
  double u = 0.0;
  double mu = 0.0;
  double sigma_alpha = 1.0;
  std::size_t k0 = 20;
  std::size_t k_max = 60;
  std::size_t predictor_k = 0;  ///< 0 = do not write a predictor
  std::string predictions;
  std::string out = "-";
  std::optional<std::uint64_t> seed;
  std::string json;
};

struct CalibrateOptions {
  std::string study;  ///< table1, table2 or sweep
  std::optional<std::size_t> reps;
  std::size_t replicates = 500;
  std::size_t target_k = 12;
  std::optional<std::size_t> m;  ///< table1 only; table2/sweep use m_values
  std::optional<std::size_t> n;
  std::optional<double> q;
  std::vector<double> u_values{0.0, 1.0 / 36.0, 1.0 / 16.0, 1.0 / 4.0};
  std::vector<double> alphas{0.01, 0.05};
  std::vector<std::size_t> m_values{61, 610};
  std::vector<double> q_values{0.25, 1.0 / 16.0};
  std::size_t k0 = 20;
  std::size_t k_max = 60;
  double alpha = 0.01;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  Outputs outputs;
};

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);
int cmd_fit(const FitOptions& options, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& options, std::ostream& out, std::ostream& err);
int cmd_calibrate(const CalibrateOptions& options, std::ostream& out, std::ostream& err);

/// Fixed 4-decimal console formatting.
std::string fixed4(double value);

}  // namespace expcorr::cli
