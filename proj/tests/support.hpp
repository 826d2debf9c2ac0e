#pragma once

// Shared test-only helpers: independent oracles (naive loops, exhaustive
// enumeration, power iteration) and small statistical utilities. Everything
// here is deliberately written the slow, obvious way and must stay
// independent of the library implementations it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "vtest/distance.hpp"
#include "vtest/matrix.hpp"
#include "vtest/rng.hpp"
#include "vtest/vstat.hpp"

namespace testsupport {

inline vtest::BinaryMatrix random_binary(std::int64_t n, std::int64_t p, double density,
                                         vtest::Rng& rng) {
  vtest::BinaryMatrix m = vtest::BinaryMatrix::zeros(n, p);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < p; ++j) {
      if (rng.bernoulli(density)) m.set(i, j, true);
    }
  }
  m.recompute_col_sums();
  return m;
}

inline vtest::NumericMatrix random_numeric(std::int64_t n, std::int64_t p, double lo,
                                           double hi, vtest::Rng& rng) {
  vtest::NumericMatrix m(n, p);
  for (double& v : m.values) v = rng.uniform(lo, hi);
  return m;
}

inline std::int64_t naive_hamming(const vtest::BinaryMatrix& m, std::int64_t i,
                                  std::int64_t j) {
  std::int64_t count = 0;
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    if (m.get(i, p) != m.get(j, p)) ++count;
  }
  return count;
}

inline double naive_manhattan(const vtest::NumericMatrix& m, std::int64_t i,
                              std::int64_t j) {
  double sum = 0.0;
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    sum += std::abs(m.at(i, p) - m.at(j, p));
  }
  return sum;
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

inline MeanVar mean_var(const std::vector<double>& values) {
  MeanVar mv;
  for (double v : values) mv.mean += v;
  mv.mean /= static_cast<double>(values.size());
  for (double v : values) {
    const double d = v - mv.mean;
    mv.var += d * d;
  }
  mv.var /= static_cast<double>(values.size());
  return mv;
}

/// V computed straight from the definition on a distance matrix.
inline double naive_v(const vtest::DistanceMatrix& d, double norm) {
  std::vector<double> pairs;
  for (std::int64_t i = 0; i < d.n; ++i) {
    for (std::int64_t j = i + 1; j < d.n; ++j) pairs.push_back(d.at(i, j));
  }
  const MeanVar mv = mean_var(pairs);  // var is the mean squared deviation
  return mv.var / norm;
}

/// Visits every arrangement of `c` ones in `n` rows (as sorted row-index
/// vectors).
inline void for_each_subset(std::int64_t n, std::int64_t c,
                            const std::function<void(const std::vector<std::int64_t>&)>& fn) {
  std::vector<std::int64_t> pick(static_cast<std::size_t>(c));
  std::function<void(std::int64_t, std::int64_t)> rec = [&](std::int64_t start,
                                                            std::int64_t depth) {
    if (depth == c) {
      fn(pick);
      return;
    }
    for (std::int64_t i = start; i <= n - (c - depth); ++i) {
      pick[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (c == 0) {
    fn({});
  } else {
    rec(0, 0);
  }
}

/// Exhaustively enumerates the column-permutation null of a small binary
/// matrix: the cartesian product of per-column one-placements, every
/// arrangement equally likely. Returns all V values.
inline std::vector<double> enumerate_esif_v(const vtest::BinaryMatrix& m, double norm) {
  std::vector<std::vector<std::vector<std::int64_t>>> choices(
      static_cast<std::size_t>(m.n_cols));
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    for_each_subset(m.n_rows, m.col_sums[static_cast<std::size_t>(p)],
                    [&](const std::vector<std::int64_t>& rows) {
                      choices[static_cast<std::size_t>(p)].push_back(rows);
                    });
  }
  std::vector<double> values;
  std::vector<std::size_t> cursor(static_cast<std::size_t>(m.n_cols), 0);
  while (true) {
    vtest::BinaryMatrix arrangement = vtest::BinaryMatrix::zeros(m.n_rows, m.n_cols);
    for (std::int64_t p = 0; p < m.n_cols; ++p) {
      for (std::int64_t row : choices[static_cast<std::size_t>(p)][cursor[static_cast<std::size_t>(p)]]) {
        arrangement.set(row, p, true);
      }
    }
    arrangement.recompute_col_sums();
    values.push_back(
        vtest::v_statistic(vtest::hamming_pairwise(arrangement), norm).v);
    std::int64_t p = 0;
    for (; p < m.n_cols; ++p) {
      if (++cursor[static_cast<std::size_t>(p)] <
          choices[static_cast<std::size_t>(p)].size()) {
        break;
      }
      cursor[static_cast<std::size_t>(p)] = 0;
    }
    if (p == m.n_cols) break;
  }
  return values;
}

/// Exhaustively enumerates the block-permutation null of a small
/// BlockDistanceSet: every tuple of per-block permutations of the rows.
inline std::vector<double> enumerate_esigf_v(const vtest::BlockDistanceSet& bd,
                                             double norm) {
  std::vector<std::int32_t> base(static_cast<std::size_t>(bd.n));
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::vector<std::int32_t>> perms;
  std::vector<std::int32_t> work = base;
  do {
    perms.push_back(work);
  } while (std::next_permutation(work.begin(), work.end()));

  const std::int64_t b_count = bd.n_blocks();
  std::vector<std::size_t> cursor(static_cast<std::size_t>(b_count), 0);
  std::vector<double> values;
  while (true) {
    vtest::DistanceMatrix total(bd.n);
    for (std::int64_t b = 0; b < b_count; ++b) {
      const auto& perm = perms[cursor[static_cast<std::size_t>(b)]];
      const auto& block = bd.blocks[static_cast<std::size_t>(b)];
      for (std::int64_t i = 0; i < bd.n; ++i) {
        for (std::int64_t j = 0; j < bd.n; ++j) {
          total.at(i, j) += block.at(perm[static_cast<std::size_t>(i)],
                                     perm[static_cast<std::size_t>(j)]);
        }
      }
    }
    values.push_back(vtest::v_statistic(total, norm).v);
    std::int64_t b = 0;
    for (; b < b_count; ++b) {
      if (++cursor[static_cast<std::size_t>(b)] < perms.size()) break;
      cursor[static_cast<std::size_t>(b)] = 0;
    }
    if (b == b_count) break;
  }
  return values;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t ia = 0;
  std::size_t ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] <= b[ib]) {
      ++ia;
    } else {
      ++ib;
    }
    const double fa = static_cast<double>(ia) / static_cast<double>(a.size());
    const double fb = static_cast<double>(ib) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

/// Critical value of the two-sample KS test at the given level.
inline double ks_critical(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  return c * std::sqrt(static_cast<double>(n + m) /
                       (static_cast<double>(n) * static_cast<double>(m)));
}

/// Largest eigenvalue of a symmetric PSD matrix by plain power iteration.
inline double power_iteration_lambda(const std::vector<double>& sym, std::int64_t n,
                                     int iterations = 20000) {
  std::vector<double> v(static_cast<std::size_t>(n), 1.0);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    for (std::int64_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::int64_t j = 0; j < n; ++j) {
        sum += sym[static_cast<std::size_t>(i * n + j)] * v[static_cast<std::size_t>(j)];
      }
      w[static_cast<std::size_t>(i)] = sum;
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    double next = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / norm;
      next += v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    }
    if (it > 64 && std::abs(next - lambda) <= 1e-14 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace testsupport
