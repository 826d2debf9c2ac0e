#pragma once

#include <cstdint>
#include <vector>

#include "vtest/matrix.hpp"
#include "vtest/result.hpp"

namespace vtest {

/// Tabulated Tracy-Widom CDF (ensemble index 1) with monotone cubic
/// interpolation between nodes. Built once by integrating the Painleve II
/// equation with Hastings-McLeod boundary data; queries outside the grid use
/// tail asymptotics.
struct TracyWidomTable {
  std::vector<double> grid;    // monotone increasing abscissae
  std::vector<double> cdf;     // F1 values at grid nodes
  std::vector<double> slopes;  // Fritsch-Carlson monotone cubic slopes

  double cdf_at(double x) const;

  /// Integrates Painleve II from s0 = 12 down to the left end of the grid
  /// with fixed-step RK4 of the given step, accumulating the exponent
  /// integrals by composite Simpson. Grid covers [-10, 6].
  static TracyWidomTable build(double step = 2.5e-4);

  /// Shared lazily built instance.
  static const TracyWidomTable& instance();
};

double f1_cdf(double x);

/// Column standardization for binary data: (x - c/N) / sqrt((c/N)(1 - c/N)).
/// Monomorphic columns (c = 0 or N) carry no information and are dropped;
/// throws NumericError when nothing is left.
NumericMatrix center_scale(const BinaryMatrix& m);

/// Column standardization for real data by sample mean and (population) sd;
/// zero-variance columns are dropped.
NumericMatrix standardize_columns(const NumericMatrix& m);

/// (lambda - mu_NP) / sigma_NP with mu_NP = (sqrt(N-1)+sqrt(P))^2 and
/// sigma_NP = (sqrt(N-1)+sqrt(P)) (1/sqrt(N-1)+1/sqrt(P))^(1/3).
double tw_normalize(double lambda_max, std::int64_t n, std::int64_t p);

struct TwTestResult {
  TestResult result;
  double lambda_max = 0.0;
  double normalized = 0.0;
  std::int64_t effective_p = 0;  // informative columns after standardization
};

/// Largest eigenvalue of the Gram matrix of the standardized data, normalized
/// and mapped to a two-sided p-value p = 2 min{F1(z), 1 - F1(z)}.
TwTestResult tw_test(const BinaryMatrix& m);
TwTestResult tw_test(const NumericMatrix& m);

}  // namespace vtest
