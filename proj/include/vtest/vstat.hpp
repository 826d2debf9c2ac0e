#pragma once

#include <cstdint>
#include <vector>

#include "vtest/block.hpp"
#include "vtest/distance.hpp"
#include "vtest/matrix.hpp"
#include "vtest/result.hpp"
#include "vtest/rng.hpp"

namespace vtest {

/// The test statistic: v is the normalized empirical variance of all pairwise
/// distances, mu their mean.
struct VValue {
  double v = 0.0;
  double mu = 0.0;
  double norm = 1.0;
};

enum class PValueType { unbiased, valid };

PValueType p_value_type_from_string(const std::string& name);
const char* p_value_type_name(PValueType t);

struct ResamplingPlan {
  std::int64_t resamples = 2000;
  std::uint64_t seed = 0;
  PValueType p_value_type = PValueType::valid;
  int threads = 0;  // <=0: all available cores
};

/// v = (1 / (norm * C(N,2))) * sum_{i<j} (d_ij - mu)^2. Requires N >= 2.
VValue v_statistic(const DistanceMatrix& d, double norm);

/// Draws a uniform element of the set of arrays with the observed column
/// sums: each column's ones are placed on a uniform random row subset, which
/// is the law induced by permuting every column independently.
BinaryMatrix resample_esif(const BinaryMatrix& m, Rng& rng);

/// Relabels each block's distance matrix by an independent uniform
/// permutation of the observations and sums the relabeled blocks.
DistanceMatrix resample_esigf(const BlockDistanceSet& bd, Rng& rng);

/// One parametric-bootstrap draw: rows i.i.d. from the product of Bernoulli
/// distributions with parameters c/N.
BinaryMatrix resample_bootstrap(const BinaryMatrix& m, Rng& rng);

/// R resampled V* values under the column-permutation null. Replicate r uses
/// stream (seed, r), so the output is independent of thread count.
std::vector<double> sample_null_esif(const BinaryMatrix& m, double norm,
                                     std::int64_t resamples, std::uint64_t seed,
                                     int threads = 0);

/// R resampled V* values under the block-permutation null on cached
/// distances.
std::vector<double> sample_null_esigf(const BlockDistanceSet& bd, double norm,
                                      std::int64_t resamples, std::uint64_t seed,
                                      int threads = 0);

/// p-value estimators: unbiased counts strictly larger resamples, valid adds
/// one to both numerator and denominator and counts ties.
double p_value_unbiased(std::int64_t count_greater, std::int64_t resamples);
double p_value_valid(std::int64_t count_geq, std::int64_t resamples);

/// Column-permutation (ES&IF) test on binary data, independent features.
TestResult permutation_test(const BinaryMatrix& m, const ResamplingPlan& plan);

/// Block-permutation test; distances are computed once per block and cached,
/// then resampled by relabeling.
TestResult permutation_test(const BinaryMatrix& m, const BlockPartition& part,
                            Metric metric, const ResamplingPlan& plan);
TestResult permutation_test(const NumericMatrix& m, const BlockPartition& part,
                            Metric metric, const ResamplingPlan& plan);

/// Block-permutation test on externally supplied distances. norm defaults to
/// 1 because the feature count is unknown; permutation p-values do not depend
/// on the choice.
TestResult permutation_test(const BlockDistanceSet& bd, const ResamplingPlan& plan,
                            double norm = 1.0);

/// Parametric bootstrap: rows redrawn i.i.d. from the product of Bernoulli
/// distributions with parameters c/N.
TestResult bootstrap_test(const BinaryMatrix& m, const ResamplingPlan& plan);

}  // namespace vtest
