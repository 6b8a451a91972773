#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "expcorr/data_table.hpp"
#include "expcorr/model_fit.hpp"

namespace expcorr {

/// Additive population model: x_ij = mu + alpha_j + beta_i + eps_ij with
/// independent Gaussian effects. q = sigma_beta^2 / sigma_eps^2.
struct AdditiveSpec {
  std::size_t m = 0;
  std::size_t n = 0;
  double mu = 0.0;
  double sigma_alpha = 1.0;
  double sigma_beta = 1.0;
  double sigma_eps = 1.0;
  std::uint64_t seed = 0;

  /// Unit item and participant SDs, noise SD chosen so that q is exact.
  static AdditiveSpec from_q(std::size_t m, std::size_t n, double q, std::uint64_t seed);
  /// Population ICC for `participants` participants.
  [[nodiscard]] double population_icc(double participants) const;
};

DataTable gen_additive(const AdditiveSpec& spec);

/// Participant-sensitivity model: x_ij = mu + alpha_j + gamma_j lambda_i + eps_ij
/// with lambda ~ N(0,1) per item and gamma_j ~ N(gamma_mean, sigma_gamma).
/// q = gamma_mean^2 / sigma_eps^2 and u = sigma_gamma^2 / sigma_eps^2.
struct SensitivitySpec {
  std::size_t m = 0;
  std::size_t n = 0;
  double mu = 0.0;
  double sigma_alpha = 1.0;
  double gamma_mean = 1.0;
  double sigma_gamma = 0.0;
  double sigma_eps = 1.0;
  std::uint64_t seed = 0;

  static SensitivitySpec from_qu(std::size_t m, std::size_t n, double q, double u, std::uint64_t seed);
};

DataTable gen_sensitivity(const SensitivitySpec& spec);

/// Regression test problem with a known number of generating parameters.
///
/// beta is standardized (mean 0, SD 1). basis columns are orthonormal, the
/// first one constant, and the remaining k0 - 1 sum to beta once scaled by
/// sqrt((m-1)/(k0-1)). Each noise column is orthogonal to every basis
/// column (hence to beta) and has sample SD sigma_eps.
struct RegressionProblem {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k0 = 0;
  std::size_t k_max = 0;
  double sigma_eps = 0.0;
  double mu = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd basis;  ///< m x k0 (H)
  Eigen::MatrixXd noise;  ///< m x n (E)
  DataTable table;

  /// Largest deviations from the structural constraints.
  struct Residuals {
    double orthonormality = 0.0;  ///< max |H^T H - I|
    double sum_constraint = 0.0;  ///< max_i |scaled row sum - beta_i|
    double noise_alignment = 0.0;  ///< max_j |E_j . beta| / (|E_j| |beta|)
  };
  [[nodiscard]] Residuals residuals() const;

  /// Columns of the k-parameter design: the first min(k, k0) basis columns
  /// followed by the first k - k0 noise columns.
  [[nodiscard]] Eigen::MatrixXd design(std::size_t k) const;
};

/// Requires 1 < k0 < k_max <= k0 + n < m and q > 0; sigma_eps = 1/sqrt(q)
/// since beta has unit SD. Throws DomainError on bad parameters.
RegressionProblem gen_regression_problem(std::size_t m, std::size_t n, std::size_t k0,
                                         std::size_t k_max, double q, std::uint64_t seed);

struct BuiltPredictor {
  PredictionVector prediction;
  std::vector<std::string> warnings;
};

/// Least-squares predictor B_k = G_k w, w = argmin |G_k w - item means|,
/// solved by a complete orthogonal decomposition (minimum-norm on rank
/// deficiency, with a warning).
BuiltPredictor build_predictor(const RegressionProblem& problem, std::size_t k);

/// All nested predictors k = 1..k_max from one QR factorization of the
/// full design. Equivalent to build_predictor while the design has full
/// column rank; falls back to it otherwise.
class NestedPredictors {
 public:
  explicit NestedPredictors(const RegressionProblem& problem);
  [[nodiscard]] Eigen::VectorXd predict(std::size_t k) const;

 private:
  const RegressionProblem* problem_;
  Eigen::MatrixXd q_;             // thin Q, m x k_max
  Eigen::VectorXd coefficients_;  // Q^T item means
  std::size_t full_rank_ = 0;     // leading columns with nonnegligible R diagonal
};

}  // namespace expcorr
