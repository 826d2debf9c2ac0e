#pragma once

#include <cstdint>
#include <utility>

namespace vtest {

/// Regularized lower incomplete gamma P(a, x): series for x < a+1, continued
/// fraction otherwise.
double gamma_p(double a, double x);

/// Chi-square CDF with df degrees of freedom.
double chi2_cdf(double x, double df);

/// Standard normal CDF.
double normal_cdf(double z);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Exact (Clopper-Pearson) binomial confidence interval for k successes out
/// of n at the given two-sided confidence level.
std::pair<double, double> binomial_ci(std::int64_t k, std::int64_t n,
                                      double confidence = 0.95);

}  // namespace vtest
