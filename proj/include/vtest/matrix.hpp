#pragma once

#include <cstdint>
#include <vector>

#include "vtest/error.hpp"

namespace vtest {

/// Dense row-major matrix of finite reals.
struct NumericMatrix {
  std::int64_t n_rows = 0;
  std::int64_t n_cols = 0;
  std::vector<double> values;  // n_rows * n_cols

  NumericMatrix() = default;
  NumericMatrix(std::int64_t rows, std::int64_t cols)
      : n_rows(rows), n_cols(cols), values(static_cast<std::size_t>(rows * cols), 0.0) {}

  double at(std::int64_t i, std::int64_t j) const {
    return values[static_cast<std::size_t>(i * n_cols + j)];
  }
  double& at(std::int64_t i, std::int64_t j) {
    return values[static_cast<std::size_t>(i * n_cols + j)];
  }
  const double* row(std::int64_t i) const { return values.data() + i * n_cols; }
};

/// 0/1 observation-by-feature matrix with bit-packed rows and cached column
/// sums. Rows are padded to whole 64-bit words; padding bits are always zero,
/// so XOR + popcount over whole words is a Hamming distance with no masking.
struct BinaryMatrix {
  std::int64_t n_rows = 0;
  std::int64_t n_cols = 0;
  std::int64_t words_per_row = 0;
  std::vector<std::uint64_t> bits;      // n_rows * words_per_row
  std::vector<std::int32_t> col_sums;   // length n_cols

  BinaryMatrix() = default;

  static BinaryMatrix zeros(std::int64_t rows, std::int64_t cols) {
    BinaryMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.words_per_row = (cols + 63) / 64;
    m.bits.assign(static_cast<std::size_t>(rows * m.words_per_row), 0);
    m.col_sums.assign(static_cast<std::size_t>(cols), 0);
    return m;
  }

  bool get(std::int64_t i, std::int64_t p) const {
    const std::uint64_t word = bits[static_cast<std::size_t>(i * words_per_row + p / 64)];
    return (word >> (p % 64)) & 1u;
  }

  /// Sets a bit without touching col_sums; call recompute_col_sums() after a
  /// batch of edits, or maintain counts at the call site.
  void set(std::int64_t i, std::int64_t p, bool value) {
    std::uint64_t& word = bits[static_cast<std::size_t>(i * words_per_row + p / 64)];
    const std::uint64_t mask = 1ull << (p % 64);
    if (value) {
      word |= mask;
    } else {
      word &= ~mask;
    }
  }

  const std::uint64_t* row_words(std::int64_t i) const {
    return bits.data() + i * words_per_row;
  }
  std::uint64_t* row_words(std::int64_t i) { return bits.data() + i * words_per_row; }

  void recompute_col_sums();

  /// Complements column p across all rows (x -> 1-x).
  void flip_column(std::int64_t p);

  bool operator==(const BinaryMatrix& other) const {
    return n_rows == other.n_rows && n_cols == other.n_cols && bits == other.bits;
  }
};

/// entry 1 iff value > threshold; ties at the threshold map to 0.
BinaryMatrix binarize(const NumericMatrix& m, double threshold);

/// True when every entry is exactly 0 or 1.
bool is_binary01(const NumericMatrix& m);

/// Exact conversion of a 0/1-valued NumericMatrix. Throws ValidationError on
/// any other entry.
BinaryMatrix to_binary(const NumericMatrix& m);

NumericMatrix to_numeric(const BinaryMatrix& m);

}  // namespace vtest
