#include "vtest/moments.hpp"

#include <cmath>
#include <optional>
#include <vector>

#include "vtest/error.hpp"

namespace vtest {

namespace {

// Shared reduction: given P2 = sum_{i!=j} a^2, P4 = sum_{i!=j} a^4,
// sum_r_sq = sum_i (row sums of a)^2 and sum_rb_sq for b = a^2, produce the
// overlap expectations. The v=0 quantities come from inclusion-exclusion over
// ordered index tuples; the first-moment total sum_{i!=j} a_ij is zero by
// centering, while for b it equals P2.
PairMomentSummary reduce_summary(std::int64_t n, double p2, double p4, double sum_r_sq,
                                 double sum_rb_sq) {
  PairMomentSummary s;
  const double k_pairs = static_cast<double>(n) * (n - 1) / 2.0;
  s.s2 = p2 / (2.0 * k_pairs);
  s.q2 = p4 / (2.0 * k_pairs);
  if (n >= 3) {
    const double triples = static_cast<double>(n) * (n - 1) * (n - 2);
    s.g1 = (sum_r_sq - p2) / triples;
    s.q1 = (sum_rb_sq - p4) / triples;
  }
  if (n >= 4) {
    const double quads = static_cast<double>(n) * (n - 1) * (n - 2) * (n - 3);
    s.g0 = (2.0 * p2 - 4.0 * sum_r_sq) / quads;
    s.q0 = (p2 * p2 + 2.0 * p4 - 4.0 * sum_rb_sq) / quads;
  }
  return s;
}

}  // namespace

PairMomentSummary block_pair_summary(const DistanceMatrix& d) {
  const std::int64_t n = d.n;
  if (n < 2) throw NumericError("pair summary needs at least 2 observations");
  const double k_pairs = static_cast<double>(n) * (n - 1) / 2.0;
  long double total = 0.0L;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      total += d.at(i, j);
    }
  }
  const double mean = static_cast<double>(total / k_pairs);
  long double p2 = 0.0L;
  long double p4 = 0.0L;
  long double sum_r_sq = 0.0L;
  long double sum_rb_sq = 0.0L;
  for (std::int64_t i = 0; i < n; ++i) {
    long double r = 0.0L;
    long double rb = 0.0L;
    for (std::int64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double a = d.at(i, j) - mean;
      const double b = a * a;
      r += a;
      rb += b;
      p2 += b;
      p4 += b * b;
    }
    sum_r_sq += r * r;
    sum_rb_sq += rb * rb;
  }
  return reduce_summary(n, static_cast<double>(p2), static_cast<double>(p4),
                        static_cast<double>(sum_r_sq), static_cast<double>(sum_rb_sq));
}

PairMomentSummary binary_column_summary(std::int64_t n, std::int64_t c) {
  if (n < 2) throw NumericError("pair summary needs at least 2 observations");
  const double k_pairs = static_cast<double>(n) * (n - 1) / 2.0;
  const double mixed = static_cast<double>(c) * (n - c);  // pairs at distance 1
  const double mean = mixed / k_pairs;
  const double am = 1.0 - mean;  // centered value on mixed pairs
  const double as = -mean;       // centered value on same-valued pairs
  const double p2 = 2.0 * (mixed * am * am + (k_pairs - mixed) * as * as);
  const double p4 =
      2.0 * (mixed * am * am * am * am + (k_pairs - mixed) * as * as * as * as);
  // row sums of a and of a^2 take one value on '1' rows, another on '0' rows
  const double r1 = (n - c) * am + (c - 1) * as;
  const double r0 = c * am + (n - 1 - c) * as;
  const double rb1 = (n - c) * am * am + (c - 1) * as * as;
  const double rb0 = c * am * am + (n - 1 - c) * as * as;
  const double sum_r_sq = c * r1 * r1 + (n - c) * r0 * r0;
  const double sum_rb_sq = c * rb1 * rb1 + (n - c) * rb0 * rb0;
  return reduce_summary(n, p2, p4, sum_r_sq, sum_rb_sq);
}

namespace {

struct Accumulator {
  long double g2 = 0.0L, g1 = 0.0L, g0 = 0.0L;
  long double q2 = 0.0L, q1 = 0.0L, q0 = 0.0L;
  long double s2_sq = 0.0L, g1_sq = 0.0L, g0_sq = 0.0L;

  void add(const PairMomentSummary& s) {
    g2 += s.s2;
    g1 += s.g1;
    g0 += s.g0;
    q2 += s.q2;
    q1 += s.q1;
    q0 += s.q0;
    s2_sq += static_cast<long double>(s.s2) * s.s2;
    g1_sq += static_cast<long double>(s.g1) * s.g1;
    g0_sq += static_cast<long double>(s.g0) * s.g0;
  }

  PermutationMoments finish(std::int64_t n, double norm) const {
    PermutationMoments m;
    m.n = n;
    m.norm = norm;
    if (n < 3) return m;  // single pair: V is identically zero
    const long double k_pairs = static_cast<long double>(n) * (n - 1) / 2.0L;
    // Cov(Z_e, Z_f) for pair overlap v is
    //   sum_b [q_b(v) - s2_b^2 - 2 g_b(v)^2] + 2 G(v)^2,
    // counted K times for v=2, 2K(N-2) for v=1 and K*C(N-2,2) for v=0.
    const long double c2 = q2 - 3.0L * s2_sq + 2.0L * g2 * g2;
    const long double c1 = q1 - s2_sq - 2.0L * g1_sq + 2.0L * g1 * g1;
    const long double c0 = q0 - s2_sq - 2.0L * g0_sq + 2.0L * g0 * g0;
    long double var_sum = c2 + 2.0L * (n - 2) * c1;
    if (n >= 4) {
      var_sum += (static_cast<long double>(n - 2) * (n - 3) / 2.0L) * c0;
    }
    m.mean_v = static_cast<double>(g2 / norm);
    const long double var_v = var_sum / (static_cast<long double>(norm) * norm * k_pairs);
    m.var_v = var_v > 0.0L ? static_cast<double>(var_v) : 0.0;
    m.cov1 = static_cast<double>(g1 / norm);
    m.cov0 = static_cast<double>(g0 / norm);
    return m;
  }
};

}  // namespace

PermutationMoments permutation_moments(const BinaryMatrix& m, double norm) {
  if (m.n_rows < 2) throw NumericError("permutation moments need at least 2 observations");
  if (!(norm > 0.0)) throw NumericError("normalization must be positive");
  Accumulator acc;
  std::vector<std::optional<PairMomentSummary>> cache(
      static_cast<std::size_t>(m.n_rows + 1));
  for (std::int32_t c : m.col_sums) {
    auto& slot = cache[static_cast<std::size_t>(c)];
    if (!slot) slot = binary_column_summary(m.n_rows, c);
    acc.add(*slot);
  }
  return acc.finish(m.n_rows, norm);
}

PermutationMoments permutation_moments(const BlockDistanceSet& bd, double norm) {
  if (bd.n < 2) throw NumericError("permutation moments need at least 2 observations");
  if (!(norm > 0.0)) throw NumericError("normalization must be positive");
  if (bd.blocks.empty()) throw NumericError("permutation moments need at least one block");
  Accumulator acc;
  for (const auto& block : bd.blocks) {
    acc.add(block_pair_summary(block));
  }
  return acc.finish(bd.n, norm);
}

}  // namespace vtest
