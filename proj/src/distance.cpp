#include "vtest/distance.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "vtest/error.hpp"

namespace vtest {

Metric metric_from_string(const std::string& name) {
  if (name == "hamming") return Metric::hamming;
  if (name == "manhattan") return Metric::manhattan;
  if (name == "euclidean-sq" || name == "euclidean_sq") return Metric::euclidean_sq;
  throw ValidationError("unknown metric '" + name +
                        "' (expected hamming, manhattan or euclidean-sq)");
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::hamming: return "hamming";
    case Metric::manhattan: return "manhattan";
    case Metric::euclidean_sq: return "euclidean-sq";
  }
  return "?";
}

std::vector<double> DistanceMatrix::upper_triangle() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_pairs()));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      out.push_back(at(i, j));
    }
  }
  return out;
}

std::int64_t BlockDistanceSet::total_features() const {
  std::int64_t sum = 0;
  for (std::int64_t s : block_sizes) sum += s;
  return sum;
}

DistanceMatrix BlockDistanceSet::total() const {
  DistanceMatrix out(n);
  for (const auto& block : blocks) {
    for (std::size_t idx = 0; idx < out.d.size(); ++idx) {
      out.d[idx] += block.d[idx];
    }
  }
  return out;
}

BlockDistanceSet BlockDistanceSet::scaled(double factor) const {
  BlockDistanceSet out = *this;
  for (auto& block : out.blocks) {
    for (double& v : block.d) v *= factor;
  }
  return out;
}

namespace {

void require_pairs(std::int64_t n) {
  if (n < 2) {
    throw ValidationError("pairwise distances need at least 2 observations");
  }
}

}  // namespace

DistanceMatrix hamming_pairwise(const BinaryMatrix& m) {
  require_pairs(m.n_rows);
  DistanceMatrix out(m.n_rows);
  const std::int64_t words = m.words_per_row;
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    const std::uint64_t* wi = m.row_words(i);
    for (std::int64_t j = i + 1; j < m.n_rows; ++j) {
      const std::uint64_t* wj = m.row_words(j);
      std::int64_t count = 0;
      for (std::int64_t w = 0; w < words; ++w) {
        count += std::popcount(wi[w] ^ wj[w]);
      }
      out.set_pair(i, j, static_cast<double>(count));
    }
  }
  return out;
}

DistanceMatrix manhattan_pairwise(const NumericMatrix& m) {
  require_pairs(m.n_rows);
  DistanceMatrix out(m.n_rows);
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    const double* ri = m.row(i);
    for (std::int64_t j = i + 1; j < m.n_rows; ++j) {
      const double* rj = m.row(j);
      double sum = 0.0;
      for (std::int64_t p = 0; p < m.n_cols; ++p) {
        sum += std::abs(ri[p] - rj[p]);
      }
      out.set_pair(i, j, sum);
    }
  }
  return out;
}

DistanceMatrix euclidean_sq_pairwise(const NumericMatrix& m) {
  require_pairs(m.n_rows);
  DistanceMatrix out(m.n_rows);
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    const double* ri = m.row(i);
    for (std::int64_t j = i + 1; j < m.n_rows; ++j) {
      const double* rj = m.row(j);
      double sum = 0.0;
      for (std::int64_t p = 0; p < m.n_cols; ++p) {
        const double diff = ri[p] - rj[p];
        sum += diff * diff;
      }
      out.set_pair(i, j, sum);
    }
  }
  return out;
}

DistanceMatrix pairwise(const NumericMatrix& m, Metric metric) {
  switch (metric) {
    case Metric::hamming:
      throw ValidationError("hamming metric requires binary data");
    case Metric::manhattan: return manhattan_pairwise(m);
    case Metric::euclidean_sq: return euclidean_sq_pairwise(m);
  }
  throw ValidationError("unknown metric");
}

BlockDistanceSet block_distances(const BinaryMatrix& m, const BlockPartition& part,
                                 Metric metric) {
  (void)metric;  // |x-y| == (x-y)^2 == [x != y] on 0/1 entries
  if (part.n_features() != m.n_cols) {
    throw ValidationError("block partition covers " + std::to_string(part.n_features()) +
                          " features but the matrix has " + std::to_string(m.n_cols));
  }
  require_pairs(m.n_rows);
  const std::int64_t b_count = part.n_blocks;
  const std::int64_t words = m.words_per_row;
  // per-block column masks
  std::vector<std::uint64_t> masks(static_cast<std::size_t>(b_count * words), 0);
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    const std::int64_t b = part.assignment[static_cast<std::size_t>(p)];
    masks[static_cast<std::size_t>(b * words + p / 64)] |= 1ull << (p % 64);
  }
  BlockDistanceSet set;
  set.n = m.n_rows;
  set.blocks.assign(static_cast<std::size_t>(b_count), DistanceMatrix(m.n_rows));
  set.block_sizes.assign(static_cast<std::size_t>(b_count), 0);
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    set.block_sizes[static_cast<std::size_t>(part.assignment[static_cast<std::size_t>(p)])]++;
  }
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    const std::uint64_t* wi = m.row_words(i);
    for (std::int64_t j = i + 1; j < m.n_rows; ++j) {
      const std::uint64_t* wj = m.row_words(j);
      for (std::int64_t b = 0; b < b_count; ++b) {
        const std::uint64_t* mask = masks.data() + b * words;
        std::int64_t count = 0;
        for (std::int64_t w = 0; w < words; ++w) {
          count += std::popcount((wi[w] ^ wj[w]) & mask[w]);
        }
        set.blocks[static_cast<std::size_t>(b)].set_pair(i, j, static_cast<double>(count));
      }
    }
  }
  return set;
}

BlockDistanceSet block_distances(const NumericMatrix& m, const BlockPartition& part,
                                 Metric metric) {
  if (part.n_features() != m.n_cols) {
    throw ValidationError("block partition covers " + std::to_string(part.n_features()) +
                          " features but the matrix has " + std::to_string(m.n_cols));
  }
  if (metric == Metric::hamming) {
    if (!is_binary01(m)) {
      throw ValidationError("hamming metric requires binary data");
    }
    return block_distances(to_binary(m), part, metric);
  }
  require_pairs(m.n_rows);
  const std::int64_t b_count = part.n_blocks;
  BlockDistanceSet set;
  set.n = m.n_rows;
  set.blocks.assign(static_cast<std::size_t>(b_count), DistanceMatrix(m.n_rows));
  set.block_sizes.assign(static_cast<std::size_t>(b_count), 0);
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    set.block_sizes[static_cast<std::size_t>(part.assignment[static_cast<std::size_t>(p)])]++;
  }
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    const double* ri = m.row(i);
    for (std::int64_t j = i + 1; j < m.n_rows; ++j) {
      const double* rj = m.row(j);
      for (std::int64_t p = 0; p < m.n_cols; ++p) {
        const std::int64_t b = part.assignment[static_cast<std::size_t>(p)];
        const double diff = ri[p] - rj[p];
        const double contrib = metric == Metric::manhattan ? std::abs(diff) : diff * diff;
        auto& block = set.blocks[static_cast<std::size_t>(b)];
        block.at(i, j) += contrib;
      }
      for (std::int64_t b = 0; b < b_count; ++b) {
        auto& block = set.blocks[static_cast<std::size_t>(b)];
        block.at(j, i) = block.at(i, j);
      }
    }
  }
  return set;
}

void validate_distance_matrix(DistanceMatrix& d, const std::string& label) {
  constexpr double kSymTol = 1e-9;
  for (std::int64_t i = 0; i < d.n; ++i) {
    if (d.at(i, i) != 0.0) {
      throw ValidationError(label + ": nonzero diagonal at row " + std::to_string(i));
    }
    for (std::int64_t j = i + 1; j < d.n; ++j) {
      const double a = d.at(i, j);
      const double b = d.at(j, i);
      if (!(std::isfinite(a) && std::isfinite(b))) {
        throw ValidationError(label + ": non-finite entry at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")");
      }
      if (std::abs(a - b) > kSymTol) {
        throw ValidationError(label + ": asymmetric at (" + std::to_string(i) + "," +
                              std::to_string(j) + "): " + std::to_string(a) + " vs " +
                              std::to_string(b));
      }
      if (a < 0.0 || b < 0.0) {
        throw ValidationError(label + ": negative entry at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
      }
      d.at(j, i) = a;  // symmetrize exactly
    }
  }
}

}  // namespace vtest
