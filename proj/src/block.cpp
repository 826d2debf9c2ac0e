#include "vtest/block.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "vtest/error.hpp"

namespace vtest {

BlockPartition BlockPartition::from_assignment(std::vector<std::int32_t> raw_ids) {
  if (raw_ids.empty()) {
    throw ValidationError("block partition: no features assigned");
  }
  // relabel by ascending original id
  std::map<std::int32_t, std::int32_t> relabel;
  for (std::int32_t id : raw_ids) relabel[id] = 0;
  std::int32_t next = 0;
  for (auto& [id, new_id] : relabel) new_id = next++;
  BlockPartition part;
  part.assignment.reserve(raw_ids.size());
  for (std::int32_t id : raw_ids) part.assignment.push_back(relabel[id]);
  part.n_blocks = next;
  if (part.n_blocks > static_cast<std::int64_t>(raw_ids.size())) {
    throw ValidationError("block partition: more blocks than features");
  }
  return part;
}

BlockPartition BlockPartition::singletons(std::int64_t n_features) {
  BlockPartition part;
  part.assignment.resize(static_cast<std::size_t>(n_features));
  for (std::int64_t p = 0; p < n_features; ++p) {
    part.assignment[static_cast<std::size_t>(p)] = static_cast<std::int32_t>(p);
  }
  part.n_blocks = static_cast<std::int32_t>(n_features);
  return part;
}

BlockPartition BlockPartition::single_block(std::int64_t n_features) {
  BlockPartition part;
  part.assignment.assign(static_cast<std::size_t>(n_features), 0);
  part.n_blocks = n_features > 0 ? 1 : 0;
  return part;
}

}  // namespace vtest
