#include "vtest/vstat.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>

#include "vtest/error.hpp"
#include "vtest/parallel.hpp"

namespace vtest {

PValueType p_value_type_from_string(const std::string& name) {
  if (name == "valid") return PValueType::valid;
  if (name == "unbiased") return PValueType::unbiased;
  throw ValidationError("unknown p-value type '" + name + "' (expected valid or unbiased)");
}

const char* p_value_type_name(PValueType t) {
  return t == PValueType::valid ? "valid" : "unbiased";
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_plan(const ResamplingPlan& plan) {
  if (plan.resamples < 1) throw ValidationError("resampling number must be >= 1");
}

// Sum of squared deviations about the mean of `values`; two-pass so that the
// result is insensitive to the overall distance magnitude.
double centered_sq_sum(const std::vector<double>& values, double* mean_out) {
  long double total = 0.0L;
  for (double v : values) total += v;
  const double mean = static_cast<double>(total / static_cast<long double>(values.size()));
  long double sq = 0.0L;
  for (double v : values) {
    const double a = v - mean;
    sq += static_cast<long double>(a) * a;
  }
  if (mean_out) *mean_out = mean;
  return static_cast<double>(sq);
}

void hamming_pairs_into(const BinaryMatrix& m, std::vector<double>& pairs) {
  const std::int64_t words = m.words_per_row;
  std::size_t e = 0;
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    const std::uint64_t* wi = m.row_words(i);
    for (std::int64_t j = i + 1; j < m.n_rows; ++j) {
      const std::uint64_t* wj = m.row_words(j);
      std::int64_t count = 0;
      for (std::int64_t w = 0; w < words; ++w) {
        count += std::popcount(wi[w] ^ wj[w]);
      }
      pairs[e++] = static_cast<double>(count);
    }
  }
}

// Draws a uniform column arrangement for every column: zero the bits, then
// place col_sums[p] ones on a uniform row subset via partial Fisher-Yates.
// `idx` is reset to the identity so that every draw is a pure function of
// (col_sums, rng stream); between columns the leftover arrangement is fine,
// partial Fisher-Yates selects uniformly from any starting permutation.
void resample_columns_into(const std::vector<std::int32_t>& col_sums, BinaryMatrix& out,
                           std::vector<std::int32_t>& idx, Rng& rng) {
  std::fill(out.bits.begin(), out.bits.end(), 0ull);
  std::iota(idx.begin(), idx.end(), 0);
  const std::int64_t n = out.n_rows;
  for (std::int64_t p = 0; p < out.n_cols; ++p) {
    const std::int32_t c = col_sums[static_cast<std::size_t>(p)];
    for (std::int32_t k = 0; k < c; ++k) {
      const std::uint64_t pick = k + rng.below(static_cast<std::uint64_t>(n - k));
      std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick)]);
      out.set(idx[static_cast<std::size_t>(k)], p, true);
    }
  }
  out.col_sums = col_sums;
}

void uniform_permutation(Rng& rng, std::vector<std::int32_t>& perm) {
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
  }
}

// One block-permutation draw: accumulate relabeled per-block distances over
// the pair list. Blocks are visited in order so that replicate streams match
// the public resample_esigf op.
void esigf_pairs_into(const BlockDistanceSet& bd, Rng& rng,
                      std::vector<std::int32_t>& perm, std::vector<double>& pairs) {
  std::fill(pairs.begin(), pairs.end(), 0.0);
  const std::int64_t n = bd.n;
  for (const auto& block : bd.blocks) {
    uniform_permutation(rng, perm);
    std::size_t e = 0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double* row = block.d.data() + static_cast<std::int64_t>(
                                                perm[static_cast<std::size_t>(i)]) * n;
      for (std::int64_t j = i + 1; j < n; ++j) {
        pairs[e++] += row[perm[static_cast<std::size_t>(j)]];
      }
    }
  }
}

}  // namespace

VValue v_statistic(const DistanceMatrix& d, double norm) {
  if (d.n < 2) throw NumericError("v_statistic needs at least 2 observations");
  if (!(norm > 0.0)) throw NumericError("normalization must be positive");
  const std::vector<double> pairs = d.upper_triangle();
  VValue out;
  out.norm = norm;
  const double raw = centered_sq_sum(pairs, &out.mu);
  out.v = raw / (norm * static_cast<double>(d.n_pairs()));
  return out;
}

BinaryMatrix resample_esif(const BinaryMatrix& m, Rng& rng) {
  BinaryMatrix out = BinaryMatrix::zeros(m.n_rows, m.n_cols);
  std::vector<std::int32_t> idx(static_cast<std::size_t>(m.n_rows));
  std::iota(idx.begin(), idx.end(), 0);
  resample_columns_into(m.col_sums, out, idx, rng);
  return out;
}

DistanceMatrix resample_esigf(const BlockDistanceSet& bd, Rng& rng) {
  if (bd.n_blocks() < 1) throw ValidationError("block distance set is empty");
  const std::int64_t n = bd.n;
  std::vector<std::int32_t> perm(static_cast<std::size_t>(n));
  std::vector<double> pairs(static_cast<std::size_t>(n * (n - 1) / 2), 0.0);
  esigf_pairs_into(bd, rng, perm, pairs);
  DistanceMatrix out(n);
  std::size_t e = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      out.set_pair(i, j, pairs[e++]);
    }
  }
  return out;
}

BinaryMatrix resample_bootstrap(const BinaryMatrix& m, Rng& rng) {
  BinaryMatrix out = BinaryMatrix::zeros(m.n_rows, m.n_cols);
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    for (std::int64_t p = 0; p < m.n_cols; ++p) {
      const double theta = static_cast<double>(m.col_sums[static_cast<std::size_t>(p)]) /
                           static_cast<double>(m.n_rows);
      if (rng.bernoulli(theta)) {
        out.set(i, p, true);
        out.col_sums[static_cast<std::size_t>(p)]++;
      }
    }
  }
  return out;
}

namespace {

// Raw (un-normalized) resampled statistics: sum of squared deviations of the
// pair distances. Dividing by norm * C(N,2) afterwards gives V*, and p-value
// counting happens directly on the raw values, which makes permutation
// p-values exactly invariant to the normalization choice.
std::vector<double> raw_null_esif(const BinaryMatrix& m, std::int64_t resamples,
                                  std::uint64_t seed, int threads) {
  std::vector<double> raw(static_cast<std::size_t>(resamples));
  const std::int64_t k_pairs = m.n_rows * (m.n_rows - 1) / 2;
  parallel_for(resamples, threads, [&](std::int64_t begin, std::int64_t end) {
    BinaryMatrix scratch = BinaryMatrix::zeros(m.n_rows, m.n_cols);
    std::vector<std::int32_t> idx(static_cast<std::size_t>(m.n_rows));
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> pairs(static_cast<std::size_t>(k_pairs));
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      resample_columns_into(m.col_sums, scratch, idx, rng);
      hamming_pairs_into(scratch, pairs);
      raw[static_cast<std::size_t>(r)] = centered_sq_sum(pairs, nullptr);
    }
  });
  return raw;
}

std::vector<double> raw_null_esigf(const BlockDistanceSet& bd, std::int64_t resamples,
                                   std::uint64_t seed, int threads, double raw_obs) {
  std::vector<double> raw(static_cast<std::size_t>(resamples));
  if (bd.n_blocks() == 1) {
    // Relabeling a single block permutes the pair multiset, so every draw
    // reproduces the observed statistic exactly.
    std::fill(raw.begin(), raw.end(), raw_obs);
    return raw;
  }
  const std::int64_t n = bd.n;
  const std::int64_t k_pairs = n * (n - 1) / 2;
  parallel_for(resamples, threads, [&](std::int64_t begin, std::int64_t end) {
    std::vector<std::int32_t> perm(static_cast<std::size_t>(n));
    std::vector<double> pairs(static_cast<std::size_t>(k_pairs));
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      esigf_pairs_into(bd, rng, perm, pairs);
      raw[static_cast<std::size_t>(r)] = centered_sq_sum(pairs, nullptr);
    }
  });
  return raw;
}

std::vector<double> raw_null_bootstrap(const BinaryMatrix& m, std::int64_t resamples,
                                       std::uint64_t seed, int threads) {
  std::vector<double> raw(static_cast<std::size_t>(resamples));
  const std::int64_t k_pairs = m.n_rows * (m.n_rows - 1) / 2;
  std::vector<double> theta(static_cast<std::size_t>(m.n_cols));
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    theta[static_cast<std::size_t>(p)] =
        static_cast<double>(m.col_sums[static_cast<std::size_t>(p)]) /
        static_cast<double>(m.n_rows);
  }
  parallel_for(resamples, threads, [&](std::int64_t begin, std::int64_t end) {
    BinaryMatrix scratch = BinaryMatrix::zeros(m.n_rows, m.n_cols);
    std::vector<double> pairs(static_cast<std::size_t>(k_pairs));
    for (std::int64_t r = begin; r < end; ++r) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
      std::fill(scratch.bits.begin(), scratch.bits.end(), 0ull);
      for (std::int64_t i = 0; i < m.n_rows; ++i) {
        for (std::int64_t p = 0; p < m.n_cols; ++p) {
          if (rng.bernoulli(theta[static_cast<std::size_t>(p)])) {
            scratch.set(i, p, true);
          }
        }
      }
      hamming_pairs_into(scratch, pairs);
      raw[static_cast<std::size_t>(r)] = centered_sq_sum(pairs, nullptr);
    }
  });
  return raw;
}

double observed_raw_from_pairs(std::vector<double>& pairs) {
  return centered_sq_sum(pairs, nullptr);
}

TestResult finish_resampled(double v_obs, double raw_obs, const std::vector<double>& raw,
                            const ResamplingPlan& plan, Method method,
                            Clock::time_point start) {
  std::int64_t greater = 0;
  std::int64_t geq = 0;
  for (double value : raw) {
    if (value > raw_obs) ++greater;
    if (value >= raw_obs) ++geq;
  }
  TestResult result;
  result.statistic = v_obs;
  result.method = method;
  result.resamples = plan.resamples;
  result.seed = plan.seed;
  result.p_value = plan.p_value_type == PValueType::unbiased
                       ? p_value_unbiased(greater, plan.resamples)
                       : p_value_valid(geq, plan.resamples);
  result.elapsed_ms = elapsed_ms_since(start);
  return result;
}

}  // namespace

std::vector<double> sample_null_esif(const BinaryMatrix& m, double norm,
                                     std::int64_t resamples, std::uint64_t seed,
                                     int threads) {
  if (m.n_rows < 2) throw NumericError("resampling needs at least 2 observations");
  std::vector<double> raw = raw_null_esif(m, resamples, seed, threads);
  const double denom = norm * static_cast<double>(m.n_rows * (m.n_rows - 1) / 2);
  for (double& v : raw) v /= denom;
  return raw;
}

std::vector<double> sample_null_esigf(const BlockDistanceSet& bd, double norm,
                                      std::int64_t resamples, std::uint64_t seed,
                                      int threads) {
  if (bd.n < 2) throw NumericError("resampling needs at least 2 observations");
  std::vector<double> pairs = bd.total().upper_triangle();
  const double raw_obs = observed_raw_from_pairs(pairs);
  std::vector<double> raw = raw_null_esigf(bd, resamples, seed, threads, raw_obs);
  const double denom = norm * static_cast<double>(bd.n * (bd.n - 1) / 2);
  for (double& v : raw) v /= denom;
  return raw;
}

double p_value_unbiased(std::int64_t count_greater, std::int64_t resamples) {
  return static_cast<double>(count_greater) / static_cast<double>(resamples);
}

double p_value_valid(std::int64_t count_geq, std::int64_t resamples) {
  return static_cast<double>(count_geq + 1) / static_cast<double>(resamples + 1);
}

TestResult permutation_test(const BinaryMatrix& m, const ResamplingPlan& plan) {
  const auto start = Clock::now();
  check_plan(plan);
  if (m.n_rows < 2) throw NumericError("permutation test needs at least 2 observations");
  const DistanceMatrix d = hamming_pairwise(m);
  const double norm = static_cast<double>(m.n_cols);
  const VValue v = v_statistic(d, norm);
  std::vector<double> pairs = d.upper_triangle();
  const double raw_obs = observed_raw_from_pairs(pairs);
  const std::vector<double> raw =
      raw_null_esif(m, plan.resamples, plan.seed, plan.threads);
  return finish_resampled(v.v, raw_obs, raw, plan, Method::permutation, start);
}

TestResult permutation_test(const BinaryMatrix& m, const BlockPartition& part,
                            Metric metric, const ResamplingPlan& plan) {
  const BlockDistanceSet bd = block_distances(m, part, metric);
  return permutation_test(bd, plan, static_cast<double>(m.n_cols));
}

TestResult permutation_test(const NumericMatrix& m, const BlockPartition& part,
                            Metric metric, const ResamplingPlan& plan) {
  const BlockDistanceSet bd = block_distances(m, part, metric);
  return permutation_test(bd, plan, static_cast<double>(m.n_cols));
}

TestResult permutation_test(const BlockDistanceSet& bd, const ResamplingPlan& plan,
                            double norm) {
  const auto start = Clock::now();
  check_plan(plan);
  if (bd.n < 2) throw NumericError("permutation test needs at least 2 observations");
  if (bd.n_blocks() < 1) throw ValidationError("block distance set is empty");
  const DistanceMatrix total = bd.total();
  const VValue v = v_statistic(total, norm);
  std::vector<double> pairs = total.upper_triangle();
  const double raw_obs = observed_raw_from_pairs(pairs);
  const std::vector<double> raw =
      raw_null_esigf(bd, plan.resamples, plan.seed, plan.threads, raw_obs);
  return finish_resampled(v.v, raw_obs, raw, plan, Method::permutation, start);
}

TestResult bootstrap_test(const BinaryMatrix& m, const ResamplingPlan& plan) {
  const auto start = Clock::now();
  check_plan(plan);
  if (m.n_rows < 2) throw NumericError("bootstrap test needs at least 2 observations");
  const DistanceMatrix d = hamming_pairwise(m);
  const double norm = static_cast<double>(m.n_cols);
  const VValue v = v_statistic(d, norm);
  std::vector<double> pairs = d.upper_triangle();
  const double raw_obs = observed_raw_from_pairs(pairs);
  const std::vector<double> raw =
      raw_null_bootstrap(m, plan.resamples, plan.seed, plan.threads);
  return finish_resampled(v.v, raw_obs, raw, plan, Method::bootstrap, start);
}

const char* method_name(Method m) {
  switch (m) {
    case Method::permutation: return "permutation";
    case Method::chi_square: return "chi_square";
    case Method::normal: return "normal";
    case Method::bootstrap: return "bootstrap";
    case Method::tracy_widom: return "tracy_widom";
  }
  return "?";
}

}  // namespace vtest
