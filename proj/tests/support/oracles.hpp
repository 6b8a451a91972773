#pragma once

// Independent reference computations used to check the library. None of
// these call into expcorr; they use libm and brute force instead.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace oracle {

/// Adaptive Simpson integral of f over [lo, hi] after splitting it into
/// `panels` equal pieces, each refined to absolute tolerance `tol` (or to
/// the rounding floor of the integral, whichever is larger).
double integrate(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14,
                 int panels = 256);

/// Beta(a, b) density normalized with std::lgamma.
double beta_density(double x, double a, double b);

/// I_x(a, b) by quadrature of the density (a, b >= 1).
double beta_cdf(double x, double a, double b);

/// F(d1, d2) CDF through the beta substitution, by quadrature.
double f_cdf(double x, double d1, double d2);

/// F quantile by bisection on the quadrature CDF.
double f_quantile(double p, double d1, double d2);

/// Chi-square CDF by quadrature of its density (df >= 2).
double chi2_cdf(double x, double df);

/// Two-way ANOVA of a complete m x n row-major table by textbook double
/// loops over deviations from row, column and grand means.
struct Anova {
  double ssi, ssp, sse, sst;
  double dfi, dfp, dfe;
  double msi, msp, mse;
};
Anova anova_complete(std::span<const double> x, std::size_t m, std::size_t n);

/// Row means over present cells by plain double loops.
std::vector<double> row_means(std::span<const double> x, std::span<const bool> present, std::size_t m,
                              std::size_t n);

/// Pearson r from the covariance formula.
double pearson(std::span<const double> x, std::span<const double> y);

/// Kolmogorov-Smirnov statistic of `sample` against U(0, 1) and its
/// asymptotic p-value.
struct Ks {
  double d;
  double p_value;
};
Ks ks_uniform(std::vector<double> sample);

/// Minimizer of f over [lo, hi] by a log-spaced grid followed by
/// golden-section refinement around the best grid point.
double grid_minimize(const std::function<double(double)>& f, double lo, double hi, int points = 400);

}  // namespace oracle
