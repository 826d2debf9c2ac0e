#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "support.hpp"
#include "vtest/error.hpp"
#include "vtest/simulate.hpp"
#include "vtest/tracy_widom.hpp"

using namespace vtest;

TEST_CASE("tw normalization constants") {
  // mu for N = P = 101 is 201 + 20 sqrt(101)
  const double mu = 201.0 + 20.0 * std::sqrt(101.0);
  CHECK(tw_normalize(mu, 101, 101) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(mu == doctest::Approx(401.9975124224178).epsilon(1e-12));
  // affine and strictly increasing in lambda
  CHECK(tw_normalize(mu + 1.0, 101, 101) > tw_normalize(mu, 101, 101));
  CHECK(tw_normalize(mu + 2.0, 101, 101) - tw_normalize(mu + 1.0, 101, 101) ==
        doctest::Approx(tw_normalize(mu + 1.0, 101, 101) - tw_normalize(mu, 101, 101))
            .epsilon(1e-12));
}

TEST_CASE("f1 table is a valid cdf with the known 0.95 quantile") {
  const TracyWidomTable& table = TracyWidomTable::instance();
  REQUIRE(table.grid.size() >= 2000);
  CHECK(table.grid.front() == doctest::Approx(-10.0));
  CHECK(table.grid.back() == doctest::Approx(6.0));
  double prev = -1.0;
  for (double c : table.cdf) {
    CHECK(c >= prev);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    prev = c;
  }
  CHECK(f1_cdf(-10.0) <= 1e-6);
  CHECK(f1_cdf(6.0) >= 1.0 - 5e-6);
  CHECK(f1_cdf(0.9793) == doctest::Approx(0.95).epsilon(5.3e-3));
  // interpolation stays monotone between nodes
  double prev_val = 0.0;
  for (double x = -6.0; x <= 4.0; x += 0.0013) {
    const double v = f1_cdf(x);
    CHECK(v >= prev_val - 1e-12);
    prev_val = v;
  }
}

TEST_CASE("table moments match the known TW1 mean and variance") {
  // Stieltjes sums over the table; the tails beyond [-10, 6] carry < 1e-5 of
  // the mass. Reference values: mean -1.2065335746, variance 1.6077810346.
  const TracyWidomTable& table = TracyWidomTable::instance();
  double mean = 0.0;
  double second = 0.0;
  for (std::size_t i = 1; i < table.grid.size(); ++i) {
    const double mass = table.cdf[i] - table.cdf[i - 1];
    const double mid = 0.5 * (table.grid[i] + table.grid[i - 1]);
    mean += mid * mass;
    second += mid * mid * mass;
  }
  CHECK(mean == doctest::Approx(-1.2065335746).epsilon(2e-4));
  CHECK(second - mean * mean == doctest::Approx(1.6077810346).epsilon(2e-3));
}

TEST_CASE("two integration resolutions agree (Richardson cross-check)") {
  const TracyWidomTable coarse = TracyWidomTable::build(5e-4);
  const TracyWidomTable fine = TracyWidomTable::build(2.5e-4);
  REQUIRE(coarse.grid.size() == fine.grid.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.grid.size(); ++i) {
    worst = std::max(worst, std::abs(coarse.cdf[i] - fine.cdf[i]));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("center_scale standardizes binary columns and drops monomorphic ones") {
  BinaryMatrix m = BinaryMatrix::zeros(2, 1);
  m.set(1, 0, true);
  m.recompute_col_sums();
  const NumericMatrix x = center_scale(m);
  CHECK(x.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(x.at(1, 0) == doctest::Approx(1.0).epsilon(1e-14));

  Rng rng(1001);
  BinaryMatrix wide = testsupport::random_binary(40, 12, 0.5, rng);
  for (std::int64_t i = 0; i < 40; ++i) wide.set(i, 5, false);
  wide.recompute_col_sums();
  const NumericMatrix xs = center_scale(wide);
  CHECK(xs.n_cols == 11);
  for (std::int64_t j = 0; j < xs.n_cols; ++j) {
    double mean = 0.0;
    double second = 0.0;
    for (std::int64_t i = 0; i < xs.n_rows; ++i) {
      mean += xs.at(i, j);
      second += xs.at(i, j) * xs.at(i, j);
    }
    mean /= static_cast<double>(xs.n_rows);
    second /= static_cast<double>(xs.n_rows);
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(second == doctest::Approx(1.0).epsilon(1e-10));
  }

  BinaryMatrix flat = BinaryMatrix::zeros(5, 3);
  flat.recompute_col_sums();
  CHECK_THROWS_WITH_AS(center_scale(flat), doctest::Contains("no informative columns"),
                       ValidationError);
}

TEST_CASE("eigensolver matches a power-iteration oracle") {
  Rng rng(321);
  const NumericMatrix data = testsupport::random_numeric(50, 80, -1.0, 1.0, rng);
  const NumericMatrix xs = standardize_columns(data);
  // build the Gram matrix by hand
  const std::int64_t n = xs.n_rows;
  std::vector<double> gram(static_cast<std::size_t>(n * n), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      double sum = 0.0;
      for (std::int64_t p = 0; p < xs.n_cols; ++p) sum += xs.at(i, p) * xs.at(j, p);
      gram[static_cast<std::size_t>(i * n + j)] = sum;
    }
  }
  const double oracle = testsupport::power_iteration_lambda(gram, n);
  const TwTestResult tw = tw_test(data);
  CHECK(tw.lambda_max == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("tw p-values are two-sided, in range and row-order invariant") {
  Rng rng(246);
  const BinaryMatrix m = testsupport::random_binary(30, 60, 0.4, rng);
  const TwTestResult a = tw_test(m);
  CHECK(a.result.p_value >= 0.0);
  CHECK(a.result.p_value <= 1.0);
  CHECK(a.result.method == Method::tracy_widom);

  BinaryMatrix reversed = BinaryMatrix::zeros(30, 60);
  for (std::int64_t i = 0; i < 30; ++i) {
    for (std::int64_t j = 0; j < 60; ++j) reversed.set(i, j, m.get(29 - i, j));
  }
  reversed.recompute_col_sums();
  const TwTestResult b = tw_test(reversed);
  CHECK(b.lambda_max == doctest::Approx(a.lambda_max).epsilon(1e-10));
  CHECK(b.result.p_value == doctest::Approx(a.result.p_value).epsilon(1e-8));
}

TEST_CASE("a z at the f1 median gives p close to 1") {
  // locate the median from the table by bisection
  double lo = -4.0;
  double hi = 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f1_cdf(mid) < 0.5 ? lo : hi) = mid;
  }
  const double median = 0.5 * (lo + hi);
  const double cdf = f1_cdf(median);
  CHECK(2.0 * std::min(cdf, 1.0 - cdf) == doctest::Approx(1.0).epsilon(1e-9));
  // TW1 median is near -1.27
  CHECK(median == doctest::Approx(-1.27).epsilon(0.01));
}

TEST_CASE("well-separated planted populations are detected at high rate") {
  ScenarioConfig cfg;
  cfg.k = 2;
  cfg.sizes = {25, 25};
  cfg.epsilon = 0.2;
  cfg.p = 1000;
  cfg.discern_frac = 1.0;
  std::int64_t rejections = 0;
  const std::int64_t reps = 30;
  for (std::uint64_t rep = 0; rep < static_cast<std::uint64_t>(reps); ++rep) {
    Rng rng = Rng::stream(852, rep);
    const GeneratedSample sample = gen_stratified(cfg, rng);
    if (tw_test(sample.data).result.p_value <= 0.05) ++rejections;
  }
  CHECK(static_cast<double>(rejections) / static_cast<double>(reps) >= 0.9);
}
