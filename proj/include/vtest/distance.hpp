#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vtest/block.hpp"
#include "vtest/matrix.hpp"

namespace vtest {

enum class Metric { hamming, manhattan, euclidean_sq };

Metric metric_from_string(const std::string& name);
const char* metric_name(Metric m);

/// Symmetric N x N pairwise distance matrix, dense, zero diagonal. Stored as
/// doubles even for integer-valued metrics so all metrics share one path.
struct DistanceMatrix {
  std::int64_t n = 0;
  std::vector<double> d;  // n * n, row-major

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::int64_t n_obs)
      : n(n_obs), d(static_cast<std::size_t>(n_obs * n_obs), 0.0) {}

  double at(std::int64_t i, std::int64_t j) const {
    return d[static_cast<std::size_t>(i * n + j)];
  }
  double& at(std::int64_t i, std::int64_t j) {
    return d[static_cast<std::size_t>(i * n + j)];
  }
  void set_pair(std::int64_t i, std::int64_t j, double value) {
    at(i, j) = value;
    at(j, i) = value;
  }
  std::int64_t n_pairs() const { return n * (n - 1) / 2; }

  /// Upper-triangle entries in (i<j) row-major order.
  std::vector<double> upper_triangle() const;
};

/// One distance matrix per block; entrywise sum of the members equals the
/// whole-matrix distance for additive metrics.
struct BlockDistanceSet {
  std::vector<DistanceMatrix> blocks;
  std::vector<std::int64_t> block_sizes;  // features per block; 0 when unknown
  std::int64_t n = 0;

  std::int64_t n_blocks() const { return static_cast<std::int64_t>(blocks.size()); }
  std::int64_t total_features() const;

  DistanceMatrix total() const;
  BlockDistanceSet scaled(double factor) const;
};

DistanceMatrix hamming_pairwise(const BinaryMatrix& m);
DistanceMatrix manhattan_pairwise(const NumericMatrix& m);
DistanceMatrix euclidean_sq_pairwise(const NumericMatrix& m);
DistanceMatrix pairwise(const NumericMatrix& m, Metric metric);

/// Per-block distances restricted to each block's columns. On 0/1 data the
/// three metrics coincide, so the binary overload packs per-block column
/// masks and uses masked XOR + popcount regardless of the requested metric.
BlockDistanceSet block_distances(const BinaryMatrix& m, const BlockPartition& part,
                                 Metric metric = Metric::hamming);
BlockDistanceSet block_distances(const NumericMatrix& m, const BlockPartition& part,
                                 Metric metric);

/// Validation shared by loaders and the BlockDistanceSet constructors:
/// symmetry within 1e-9 (entries are then symmetrized exactly), non-negative
/// entries, zero diagonal. `label` names the offending input in errors.
void validate_distance_matrix(DistanceMatrix& d, const std::string& label);

}  // namespace vtest
