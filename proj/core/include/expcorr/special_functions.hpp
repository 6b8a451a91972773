#pragma once

// Regularized incomplete beta/gamma functions and the beta, F and chi-square
// distribution functions built on them. Everything here is a pure function.

namespace expcorr {

/// A probability in [0, 1]. Construction outside that range throws DomainError.
class Probability {
 public:
  explicit Probability(double value);
  [[nodiscard]] double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_;
};

/// Strictly positive degrees of freedom (integer at every call site, but the
/// distributions accept any positive real).
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(double value);
  [[nodiscard]] double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }  // NOLINT(google-explicit-constructor)

 private:
  double value_;
};

/// Natural log of the gamma function for x > 0 (Lanczos approximation).
double log_gamma(double x);

/// Regularized incomplete beta function I_x(a, b).
Probability reg_inc_beta(double x, double a, double b);

/// Lower regularized incomplete gamma function P(a, x).
Probability reg_lower_gamma(double a, double x);

/// Absolute tolerance on |I_x(a,b) - p| at which quant_beta stops bisecting.
inline constexpr double kQuantBetaTolerance = 1e-6;

/// Beta quantile by bisection on [0, 1] until |I_x(a,b) - p| <=
/// kQuantBetaTolerance, then polished by safeguarded Newton steps inside the
/// final bracket. The result always meets the tolerance and is usually
/// accurate to a few ulps.
double quant_beta(Probability p, double a, double b);

/// F(d1, d2) quantile via the beta quantile: x = u d2 / ((1 - u) d1) with
/// u = quant_beta(p, d1/2, d2/2). p = 1 has no finite quantile and throws.
double quant_f(Probability p, DegreesOfFreedom d1, DegreesOfFreedom d2);

/// Chi-square CDF, P(df/2, x/2).
Probability prob_chi2(double x, DegreesOfFreedom df);

}  // namespace expcorr
