#pragma once

#include <cstdint>

#include "vtest/distance.hpp"
#include "vtest/matrix.hpp"

namespace vtest {

/// Per-block summary of the centered pair-distance process under a uniform
/// relabeling of the block. With a_ij = d_ij - mean and b_ij = a_ij^2:
///   s2   = E[a_EF^2]           over a uniform pair (E,F)
///   g1   = E[a_EF a_EG]        pairs sharing exactly one index
///   g0   = E[a_EF a_GH]        disjoint pairs (defined for N >= 4)
///   q2   = E[a_EF^4]
///   q1   = E[b_EF b_EG]
///   q0   = E[b_EF b_GH]        (defined for N >= 4)
/// Every block satisfies s2 + 2(N-2) g1 + C(N-2,2) g0 = 0 exactly.
struct PairMomentSummary {
  double s2 = 0.0;
  double g1 = 0.0;
  double g0 = 0.0;
  double q2 = 0.0;
  double q1 = 0.0;
  double q0 = 0.0;
};

/// O(N^2) reduction of an arbitrary block distance matrix.
PairMomentSummary block_pair_summary(const DistanceMatrix& d);

/// Closed form for a single binary column with column sum c out of N rows
/// (Hamming distances are 1 on mixed pairs, 0 otherwise).
PairMomentSummary binary_column_summary(std::int64_t n, std::int64_t c);

/// Exact first two moments of V under the applicable permutation null, plus
/// the summed pair covariances across blocks (in V units, i.e. divided by the
/// normalization). cov2 == mean_v; cov1 and cov0 feed the large-P weights.
struct PermutationMoments {
  double mean_v = 0.0;
  double var_v = 0.0;
  double cov1 = 0.0;
  double cov0 = 0.0;
  std::int64_t n = 0;
  double norm = 1.0;
};

/// ES&IF moments: every column is its own block; per-column summaries come
/// from the closed form keyed by the column sum.
PermutationMoments permutation_moments(const BinaryMatrix& m, double norm);

/// ES&IGF moments on cached block distances.
PermutationMoments permutation_moments(const BlockDistanceSet& bd, double norm);

}  // namespace vtest
