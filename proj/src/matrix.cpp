#include "vtest/matrix.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace vtest {

void BinaryMatrix::recompute_col_sums() {
  col_sums.assign(static_cast<std::size_t>(n_cols), 0);
  for (std::int64_t i = 0; i < n_rows; ++i) {
    const std::uint64_t* words = row_words(i);
    for (std::int64_t w = 0; w < words_per_row; ++w) {
      std::uint64_t word = words[w];
      while (word) {
        const int bit = std::countr_zero(word);
        col_sums[static_cast<std::size_t>(w * 64 + bit)]++;
        word &= word - 1;
      }
    }
  }
}

void BinaryMatrix::flip_column(std::int64_t p) {
  for (std::int64_t i = 0; i < n_rows; ++i) {
    set(i, p, !get(i, p));
  }
  col_sums[static_cast<std::size_t>(p)] =
      static_cast<std::int32_t>(n_rows) - col_sums[static_cast<std::size_t>(p)];
}

BinaryMatrix binarize(const NumericMatrix& m, double threshold) {
  BinaryMatrix out = BinaryMatrix::zeros(m.n_rows, m.n_cols);
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    for (std::int64_t j = 0; j < m.n_cols; ++j) {
      if (m.at(i, j) > threshold) {
        out.set(i, j, true);
        out.col_sums[static_cast<std::size_t>(j)]++;
      }
    }
  }
  return out;
}

bool is_binary01(const NumericMatrix& m) {
  for (double v : m.values) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

BinaryMatrix to_binary(const NumericMatrix& m) {
  if (!is_binary01(m)) {
    throw ValidationError("matrix has entries other than 0/1; binarize it first");
  }
  return binarize(m, 0.5);
}

NumericMatrix to_numeric(const BinaryMatrix& m) {
  NumericMatrix out(m.n_rows, m.n_cols);
  for (std::int64_t i = 0; i < m.n_rows; ++i) {
    for (std::int64_t j = 0; j < m.n_cols; ++j) {
      out.at(i, j) = m.get(i, j) ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace vtest
