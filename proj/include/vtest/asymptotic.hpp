#pragma once

#include <cstdint>

#include "vtest/block.hpp"
#include "vtest/distance.hpp"
#include "vtest/matrix.hpp"
#include "vtest/moments.hpp"
#include "vtest/result.hpp"
#include "vtest/vstat.hpp"

namespace vtest {

/// Large-P null of V: scale * (a1 * chi2_df1 + a2 * chi2_df2) with
/// df1 = N-1, df2 = C(N-1,2)-1 and scale = 1/C(N,2).
struct ChiSquareMixture {
  double a1 = 0.0;
  double a2 = 0.0;
  std::int64_t df1 = 0;
  std::int64_t df2 = 0;
  double scale = 0.0;

  double mean() const { return scale * (a1 * df1 + a2 * df2); }
  double variance() const { return scale * scale * 2.0 * (a1 * a1 * df1 + a2 * a2 * df2); }
};

/// Solves the two-moment system for (a1, a2) on the non-negative branch.
/// Both quadratic roots are frequently admissible; the tie is broken by the
/// asymptotic weights implied by the pair covariances (cov1), toward which
/// the moment-matched solution converges as P grows. Requires N >= 4 and
/// var_v > 0; throws NumericError otherwise, recommending the permutation
/// pathway.
ChiSquareMixture fit_mixture(const PermutationMoments& moments, std::int64_t n);

/// CDF of the mixture by numerical inversion of the characteristic function
/// (Imhof's formula), absolute error <= 1e-8.
double mixture_cdf(const ChiSquareMixture& mix, double t);

/// Upper tail P(mixture > t), same accuracy.
double mixture_sf(const ChiSquareMixture& mix, double t);

/// Large-P test: p = upper tail of the fitted mixture at v_obs.
TestResult chi_square_test(double v_obs, const PermutationMoments& moments);

/// Large-N,P Gaussian test: upper tail of Normal(mean_v, var_v) at v_obs.
/// Requires var_v > 0.
TestResult normal_test(const PermutationMoments& moments, double v_obs);

/// Dispatch policy: the asymptotic null is trusted once the number of
/// independent units (features, or blocks) reaches min_independent.
struct AutoPolicy {
  std::int64_t min_independent = 50;
};

/// Independent-feature dispatch: chi-square when P >= threshold, else the
/// column-permutation test. Falls back to permutation when the mixture is
/// unavailable (N < 4).
TestResult auto_test(const BinaryMatrix& m, const ResamplingPlan& plan,
                     const AutoPolicy& policy = {});

/// Block dispatch: chi-square when B >= threshold, else block permutation.
TestResult auto_test(const BinaryMatrix& m, const BlockPartition& part, Metric metric,
                     const ResamplingPlan& plan, const AutoPolicy& policy = {});
TestResult auto_test(const NumericMatrix& m, const BlockPartition& part, Metric metric,
                     const ResamplingPlan& plan, const AutoPolicy& policy = {});
TestResult auto_test(const BlockDistanceSet& bd, const ResamplingPlan& plan,
                     double norm = 1.0, const AutoPolicy& policy = {});

}  // namespace vtest
