#include "expcorr/special_functions.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "expcorr/error.hpp"

namespace expcorr {

namespace {

constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw DomainError("reg_inc_beta: continued fraction did not converge for a=" + std::to_string(a) +
                    ", b=" + std::to_string(b));
}

double gamma_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 1; n <= kMaxIterations; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
  }
  throw DomainError("reg_lower_gamma: series did not converge");
}

// Upper regularized gamma Q(a, x) by continued fraction.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) {
      return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
    }
  }
  throw DomainError("reg_lower_gamma: continued fraction did not converge");
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("probability outside [0,1]: " + std::to_string(value));
  }
}

DegreesOfFreedom::DegreesOfFreedom(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError("degrees of freedom must be positive: " + std::to_string(value));
  }
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma requires x > 0");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  static constexpr std::array<double, 9> kLanczos = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double g = 7.0;
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

Probability reg_inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta: x outside [0,1]");
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("reg_inc_beta: a and b must be positive");
  if (x == 0.0) return Probability(0.0);
  if (x == 1.0) return Probability(1.0);
  const double log_front =
      log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  double value;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    value = front * beta_continued_fraction(x, a, b) / a;
  } else {
    value = 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
  }
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return Probability(value);
}

Probability reg_lower_gamma(double a, double x) {
  if (!(a > 0.0)) throw DomainError("reg_lower_gamma: a must be positive");
  if (!(x >= 0.0)) throw DomainError("reg_lower_gamma: x must be nonnegative");
  if (x == 0.0) return Probability(0.0);
  if (std::isinf(x)) return Probability(1.0);
  double value = x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_continued_fraction(a, x);
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return Probability(value);
}

double quant_beta(Probability p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("quant_beta: a and b must be positive");
  if (p.value() == 0.0) return 0.0;
  if (p.value() == 1.0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double x = 0.5;
  double dp = reg_inc_beta(x, a, b) - p;
  while (std::abs(dp) > kQuantBetaTolerance) {
    if (dp <= 0.0) lo = x;
    if (dp >= 0.0) hi = x;
    const double mid = 0.5 * (lo + hi);
    if (mid == x) break;  // bracket exhausted at double resolution
    x = mid;
    dp = reg_inc_beta(x, a, b) - p;
  }

  // Safeguarded Newton polish inside the bisection bracket. Near the tails
  // an error of 1e-6 in probability is a large error in x, and F quantiles
  // amplify it further by 1/(1-x)^2.
  const double log_norm = log_gamma(a + b) - log_gamma(a) - log_gamma(b);
  for (int i = 0; i < 60 && dp != 0.0; ++i) {
    if (dp < 0.0) lo = x; else hi = x;
    const double density = std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x));
    double next = x - dp / density;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == x) break;
    const double step = std::abs(next - x);
    x = next;
    dp = reg_inc_beta(x, a, b) - p;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * x) break;
  }
  return x;
}

double quant_f(Probability p, DegreesOfFreedom d1, DegreesOfFreedom d2) {
  if (p.value() == 1.0) throw DomainError("quant_f: the quantile at p = 1 is unbounded");
  const double u = quant_beta(p, d1 / 2.0, d2 / 2.0);
  return u * d2 / ((1.0 - u) * d1);
}

Probability prob_chi2(double x, DegreesOfFreedom df) {
  if (!(x >= 0.0)) throw DomainError("prob_chi2: x must be nonnegative");
  return reg_lower_gamma(df / 2.0, x / 2.0);
}

}  // namespace expcorr
