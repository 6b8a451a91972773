#include "expcorr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "expcorr/anova.hpp"
#include "expcorr/error.hpp"
#include "expcorr/random.hpp"

namespace expcorr {

namespace {

// Stream identifiers; each random component of a generator draws from its
// own keyed stream so adding a component never shifts the others.
enum StreamId : std::uint64_t {
  kParticipantEffects = 1,
  kItemEffects = 2,
  kNoise = 3,
  kSensitivity = 4,
  kGrandMean = 5,
  kBasis = 6,
};

constexpr double kStructuralTolerance = 1e-10;

void require_shape(std::size_t m, std::size_t n) {
  if (m < 2 || n < 2) throw DomainError("synthetic tables need m >= 2 and n >= 2");
}

void require_sd(double sd, const char* name) {
  if (!(sd >= 0.0) || !std::isfinite(sd)) throw DomainError(std::string(name) + " must be a finite SD >= 0");
}

std::vector<double> draw(RandomStream rng, std::size_t count, double sd) {
  std::vector<double> out(count);
  for (auto& v : out) v = rng.normal(0.0, sd);
  return out;
}

DataTable compose(std::size_t m, std::size_t n, auto&& cell) {
  std::vector<double> values(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) values[i * n + j] = cell(i, j);
  }
  return DataTable::complete(m, n, values);
}

// Removes the components of `v` along the orthonormal columns [0, count) of `basis`.
void project_out(Eigen::Ref<Eigen::VectorXd> v, const Eigen::MatrixXd& basis, Eigen::Index count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index c = 0; c < count; ++c) v -= basis.col(c).dot(v) * basis.col(c);
  }
}

}  // namespace

AdditiveSpec AdditiveSpec::from_q(std::size_t m, std::size_t n, double q, std::uint64_t seed) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  return {m, n, 0.0, 1.0, 1.0, 1.0 / std::sqrt(q), seed};
}

double AdditiveSpec::population_icc(double participants) const {
  const double q = sigma_beta * sigma_beta / (sigma_eps * sigma_eps);
  return extrapolate_icc(q, participants);
}

DataTable gen_additive(const AdditiveSpec& spec) {
  require_shape(spec.m, spec.n);
  require_sd(spec.sigma_alpha, "sigma_alpha");
  require_sd(spec.sigma_beta, "sigma_beta");
  require_sd(spec.sigma_eps, "sigma_eps");
  const auto alpha = draw(RandomStream(spec.seed, {kParticipantEffects}), spec.n, spec.sigma_alpha);
  const auto beta = draw(RandomStream(spec.seed, {kItemEffects}), spec.m, spec.sigma_beta);
  RandomStream noise(spec.seed, {kNoise});
  return compose(spec.m, spec.n, [&](std::size_t i, std::size_t j) {
    return spec.mu + alpha[j] + beta[i] + noise.normal(0.0, spec.sigma_eps);
  });
}

SensitivitySpec SensitivitySpec::from_qu(std::size_t m, std::size_t n, double q, double u,
                                         std::uint64_t seed) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  if (!(u >= 0.0)) throw DomainError("u must be nonnegative");
  const double sigma_eps = 1.0 / std::sqrt(q);
  return {m, n, 0.0, 1.0, 1.0, std::sqrt(u) * sigma_eps, sigma_eps, seed};
}

DataTable gen_sensitivity(const SensitivitySpec& spec) {
  require_shape(spec.m, spec.n);
  require_sd(spec.sigma_alpha, "sigma_alpha");
  require_sd(spec.sigma_gamma, "sigma_gamma");
  require_sd(spec.sigma_eps, "sigma_eps");
  // Same streams as gen_additive: with sigma_gamma = 0 and gamma_mean = sigma_beta
  // the two generators produce the same table.
  const auto alpha = draw(RandomStream(spec.seed, {kParticipantEffects}), spec.n, spec.sigma_alpha);
  const auto lambda = draw(RandomStream(spec.seed, {kItemEffects}), spec.m, 1.0);
  RandomStream sensitivity(spec.seed, {kSensitivity});
  std::vector<double> gamma(spec.n);
  for (auto& g : gamma) g = sensitivity.normal(spec.gamma_mean, spec.sigma_gamma);
  RandomStream noise(spec.seed, {kNoise});
  return compose(spec.m, spec.n, [&](std::size_t i, std::size_t j) {
    return spec.mu + alpha[j] + gamma[j] * lambda[i] + noise.normal(0.0, spec.sigma_eps);
  });
}

RegressionProblem gen_regression_problem(std::size_t m, std::size_t n, std::size_t k0, std::size_t k_max,
                                         double q, std::uint64_t seed) {
  if (!(1 < k0 && k0 < k_max && k_max <= k0 + n && k0 + n < m)) {
    throw DomainError("regression problem needs 1 < k0 < k_max <= k0 + n < m (got m=" + std::to_string(m) +
                      ", n=" + std::to_string(n) + ", k0=" + std::to_string(k0) +
                      ", k_max=" + std::to_string(k_max) + ")");
  }
  if (!(q > 0.0)) throw DomainError("q must be positive");
  const auto mi = static_cast<Eigen::Index>(m);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto ki = static_cast<Eigen::Index>(k0);

  // Item effect: Gaussian draw standardized to mean 0 and SD 1, so |beta|^2 = m - 1.
  RandomStream beta_rng(seed, {kItemEffects});
  Eigen::VectorXd beta(mi);
  for (auto& b : beta) b = beta_rng.normal();
  beta.array() -= beta.mean();
  beta *= std::sqrt(static_cast<double>(m - 1)) / beta.norm();

  RandomStream alpha_rng(seed, {kParticipantEffects});
  Eigen::VectorXd alpha(ni);
  for (auto& a : alpha) a = alpha_rng.normal();

  const double mu = 1000.0 * RandomStream(seed, {kGrandMean}).uniform();
  const double sigma_eps = 1.0 / std::sqrt(q);

  // Orthonormal frame [1/sqrt(m), beta/|beta|, Gaussian directions...].
  Eigen::MatrixXd frame(mi, ki);
  frame.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(m)));
  frame.col(1) = beta / beta.norm();
  RandomStream basis_rng(seed, {kBasis});
  for (Eigen::Index c = 2; c < ki; ++c) {
    Eigen::VectorXd v(mi);
    for (auto& x : v) x = basis_rng.normal();
    project_out(v, frame, c);
    frame.col(c) = v / v.norm();
  }
  // Reflect the k0 - 1 non-constant directions so that their sum points
  // along beta: the Householder map R swaps e1 and 1/sqrt(k0-1), hence
  // W R 1 = sqrt(k0-1) W e1 = sqrt(k0-1) beta/|beta|.
  const Eigen::Index free_cols = ki - 1;
  Eigen::MatrixXd reflector = Eigen::MatrixXd::Identity(free_cols, free_cols);
  if (free_cols > 1) {
    Eigen::VectorXd v = -Eigen::VectorXd::Constant(free_cols, 1.0 / std::sqrt(static_cast<double>(free_cols)));
    v(0) += 1.0;
    reflector -= 2.0 * v * v.transpose() / v.squaredNorm();
  }
  Eigen::MatrixXd basis(mi, ki);
  basis.col(0) = frame.col(0);
  basis.rightCols(free_cols) = frame.rightCols(free_cols) * reflector;

  // Noise: Gaussian columns with the whole basis span removed (which holds
  // beta and the constant), rescaled to SD sigma_eps. Removing only beta
  // would let the k0-parameter predictor absorb the noise lying along the
  // other basis directions, biasing its fit upward by about (k0-2)/(m-1)
  // of the noise variance; with the span removed, B_k0 is exactly the
  // generating part of the item means.
  RandomStream noise_rng(seed, {kNoise});
  Eigen::MatrixXd noise(mi, ni);
  for (Eigen::Index j = 0; j < ni; ++j) {
    Eigen::VectorXd e(mi);
    for (auto& x : e) x = noise_rng.normal();
    project_out(e, frame, ki);
    const double sd = std::sqrt((e.array() - e.mean()).square().sum() / static_cast<double>(m - 1));
    noise.col(j) = e * (sigma_eps / sd);
  }

  std::vector<double> values(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      values[i * n + j] = mu + alpha(jj) + beta(ii) + noise(ii, jj);
    }
  }

  RegressionProblem problem{m,     n,     k0,    k_max, sigma_eps, mu, std::move(beta), std::move(alpha),
                            std::move(basis), std::move(noise), DataTable::complete(m, n, values)};
  const auto res = problem.residuals();
  if (res.orthonormality > kStructuralTolerance || res.sum_constraint > kStructuralTolerance ||
      res.noise_alignment > kStructuralTolerance) {
    throw Error("regression problem violates its structural constraints (orthonormality " +
                std::to_string(res.orthonormality) + ", sum " + std::to_string(res.sum_constraint) +
                ", noise " + std::to_string(res.noise_alignment) + ")");
  }
  return problem;
}

RegressionProblem::Residuals RegressionProblem::residuals() const {
  Residuals r;
  const auto ki = basis.cols();
  r.orthonormality =
      (basis.transpose() * basis - Eigen::MatrixXd::Identity(ki, ki)).cwiseAbs().maxCoeff();
  const double scale = std::sqrt(static_cast<double>(m - 1) / static_cast<double>(k0 - 1));
  const Eigen::VectorXd scaled_sum = scale * basis.rightCols(ki - 1).rowwise().sum();
  r.sum_constraint = (scaled_sum - beta).cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < noise.cols(); ++j) {
    const double cosine = std::abs(noise.col(j).dot(beta)) / (noise.col(j).norm() * beta.norm());
    r.noise_alignment = std::max(r.noise_alignment, cosine);
  }
  return r;
}

Eigen::MatrixXd RegressionProblem::design(std::size_t k) const {
  if (k < 1 || k > k_max) throw DomainError("design size must lie in [1, k_max]");
  const auto from_basis = static_cast<Eigen::Index>(std::min(k, k0));
  const auto from_noise = static_cast<Eigen::Index>(k > k0 ? k - k0 : 0);
  Eigen::MatrixXd g(basis.rows(), from_basis + from_noise);
  g.leftCols(from_basis) = basis.leftCols(from_basis);
  if (from_noise > 0) g.rightCols(from_noise) = noise.leftCols(from_noise);
  return g;
}

namespace {

Eigen::VectorXd item_mean_vector(const DataTable& table) {
  const ItemMeans means = item_means(table);
  return Eigen::Map<const Eigen::VectorXd>(means.means.data(), static_cast<Eigen::Index>(means.means.size()));
}

}  // namespace

BuiltPredictor build_predictor(const RegressionProblem& problem, std::size_t k) {
  if (k < 2 || k > problem.k_max) {
    throw DomainError("predictor size must lie in [2, " + std::to_string(problem.k_max) + "]");
  }
  const Eigen::MatrixXd g = problem.design(k);
  const Eigen::VectorXd x = item_mean_vector(problem.table);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(g);
  BuiltPredictor out;
  if (cod.rank() < g.cols()) {
    out.warnings.push_back("design with k=" + std::to_string(k) + " is rank deficient (rank " +
                           std::to_string(cod.rank()) + "); using the minimum-norm solution");
  }
  const Eigen::VectorXd b = g * cod.solve(x);
  out.prediction = {std::vector<double>(b.data(), b.data() + b.size()), PredictionKind::predictor};
  return out;
}

NestedPredictors::NestedPredictors(const RegressionProblem& problem) : problem_(&problem) {
  const Eigen::MatrixXd g = problem.design(problem.k_max);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  q_ = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  coefficients_ = q_.transpose() * item_mean_vector(problem.table);
  const Eigen::VectorXd diag = qr.matrixQR().diagonal().cwiseAbs();
  const double threshold = 1e-10 * diag.maxCoeff();
  full_rank_ = 0;
  while (full_rank_ < static_cast<std::size_t>(diag.size()) &&
         diag(static_cast<Eigen::Index>(full_rank_)) > threshold) {
    ++full_rank_;
  }
}

Eigen::VectorXd NestedPredictors::predict(std::size_t k) const {
  if (k < 1 || k > problem_->k_max) throw DomainError("predictor size out of range");
  if (k > full_rank_) {
    const auto built = build_predictor(*problem_, k);
    const auto& v = built.prediction.values;
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const auto ki = static_cast<Eigen::Index>(k);
  return q_.leftCols(ki) * coefficients_.head(ki);
}

}  // namespace expcorr
