#pragma once

#include <cstdint>
#include <vector>

namespace vtest {

/// Surjective map feature index -> block id in [0, n_blocks). Block ids are
/// always contiguous 0..B-1; loaders relabel arbitrary input ids by ascending
/// original value.
struct BlockPartition {
  std::vector<std::int32_t> assignment;  // length P
  std::int32_t n_blocks = 0;

  std::int64_t n_features() const { return static_cast<std::int64_t>(assignment.size()); }

  /// Validates and relabels an arbitrary id vector. Throws ValidationError if
  /// the result would not be surjective onto 0..B-1.
  static BlockPartition from_assignment(std::vector<std::int32_t> raw_ids);

  /// One block per feature: the independent-features case.
  static BlockPartition singletons(std::int64_t n_features);

  /// All features in one block.
  static BlockPartition single_block(std::int64_t n_features);
};

}  // namespace vtest
