#include "vtest/tracy_widom.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vtest/error.hpp"

namespace vtest {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kGridLeft = -10.0;
constexpr double kGridRight = 6.0;
constexpr double kStartS = 12.0;

// Airy Ai and Ai' from the large-argument asymptotic series, summed to the
// smallest term. At s = 12 the series bottoms out near 1e-16 relative, which
// matters: the Hastings-McLeod solution is a separatrix, and initial-data
// error is amplified by roughly exp(zeta(s0)) * exp((2 sqrt(2)/3)|s|^{3/2})
// on the way down to negative s.
void airy_asymptotic(double s, double* ai, double* aip) {
  const double zeta = 2.0 / 3.0 * std::pow(s, 1.5);
  double uk = 1.0;
  double sum_u = 1.0;
  double sum_v = 1.0;
  double sign = 1.0;
  double prev = 1.0;
  for (int k = 1; k <= 60; ++k) {
    uk *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
          (216.0 * k * (2.0 * k - 1.0));
    const double term = uk / std::pow(zeta, k);
    if (term > prev) break;  // asymptotic series started diverging
    prev = term;
    sign = -sign;
    sum_u += sign * term;
    sum_v += sign * term * (-(6.0 * k + 1.0) / (6.0 * k - 1.0));
    if (term < 1e-18) break;
  }
  const double front = std::exp(-zeta) / (2.0 * std::sqrt(kPi));
  *ai = front * sum_u / std::pow(s, 0.25);
  *aip = -front * sum_v * std::pow(s, 0.25);
}

struct PainleveState {
  double u;
  double up;
};

PainleveState painleve_rhs(double s, const PainleveState& y) {
  return {y.up, 2.0 * y.u * y.u * y.u + s * y.u};
}

PainleveState rk4_step(double s, const PainleveState& y, double h) {
  const PainleveState k1 = painleve_rhs(s, y);
  const PainleveState k2 =
      painleve_rhs(s + 0.5 * h, {y.u + 0.5 * h * k1.u, y.up + 0.5 * h * k1.up});
  const PainleveState k3 =
      painleve_rhs(s + 0.5 * h, {y.u + 0.5 * h * k2.u, y.up + 0.5 * h * k2.up});
  const PainleveState k4 = painleve_rhs(s + h, {y.u + h * k3.u, y.up + h * k3.up});
  return {y.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
          y.up + h / 6.0 * (k1.up + 2.0 * k2.up + 2.0 * k3.up + k4.up)};
}

// Composite Simpson over an even number of uniform intervals, descending s.
double simpson_chunk(const std::vector<double>& f, std::size_t begin, std::size_t count,
                     double h) {
  double sum = f[begin] + f[begin + count];
  for (std::size_t i = 1; i < count; i += 2) sum += 4.0 * f[begin + i];
  for (std::size_t i = 2; i < count; i += 2) sum += 2.0 * f[begin + i];
  return sum * h / 3.0;
}

double right_tail(double x) {  // 1 - F1(x) for x beyond the grid
  const double zeta = 2.0 / 3.0 * std::pow(x, 1.5);
  return std::exp(-zeta) / (4.0 * std::sqrt(kPi) * std::pow(x, 0.75)) *
         (1.0 - 41.0 / (72.0 * zeta));
}

double left_tail(double x) {  // F1(x) for x beyond the left end of the grid
  const double ax = -x;
  // tau_1 = 2^(-11/48) exp(zeta'(-1)/2)
  const double tau1 = 0.78537687287823979;
  const double log_f = -ax * ax * ax / 24.0 - std::pow(ax, 1.5) / (3.0 * std::sqrt(2.0)) -
                       std::log(ax) / 16.0 + std::log(tau1);
  return std::exp(log_f);
}

}  // namespace

TracyWidomTable TracyWidomTable::build(double step) {
  // Grid nodes every 0.008 over [-10, 6]; the ODE grid must subdivide that
  // spacing into an even number of steps for the Simpson accumulation.
  constexpr double kNodeSpacing = 0.008;
  const std::int64_t per_node = static_cast<std::int64_t>(std::round(kNodeSpacing / step));
  if (per_node < 2 || per_node % 2 != 0 ||
      std::abs(per_node * step - kNodeSpacing) > 1e-12) {
    throw NumericError("table step must divide the node spacing into an even count");
  }
  const std::int64_t n_nodes =
      static_cast<std::int64_t>(std::round((kGridRight - kGridLeft) / kNodeSpacing)) + 1;
  const std::int64_t head_steps =
      static_cast<std::int64_t>(std::round((kStartS - kGridRight) / step));
  const std::int64_t total_steps =
      head_steps + (n_nodes - 1) * per_node;

  // March Painleve II downward, recording u on the uniform grid.
  std::vector<double> u(static_cast<std::size_t>(total_steps + 1));
  PainleveState y{};
  airy_asymptotic(kStartS, &y.u, &y.up);
  u[0] = y.u;
  for (std::int64_t i = 0; i < total_steps; ++i) {
    const double s = kStartS - static_cast<double>(i) * step;
    y = rk4_step(s, y, -step);
    u[static_cast<std::size_t>(i + 1)] = y.u;
  }

  // Cumulative integrals of u, u^2 and s u^2 from the start point down to
  // each table node, plus the analytic tail above the start point.
  std::vector<double> f1(u.size()), f2(u.size()), f3(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = kStartS - static_cast<double>(i) * step;
    f1[i] = u[i];
    f2[i] = u[i] * u[i];
    f3[i] = s * u[i] * u[i];
  }
  double ai0, aip0;
  airy_asymptotic(kStartS, &ai0, &aip0);
  (void)aip0;
  const double zeta0 = 2.0 / 3.0 * std::pow(kStartS, 1.5);
  double i1 = std::exp(-zeta0) / (2.0 * std::sqrt(kPi) * std::pow(kStartS, 0.75));
  double i2 = ai0 * ai0 / (2.0 * std::sqrt(kStartS));
  double i3 = kStartS * i2;

  TracyWidomTable table;
  table.grid.resize(static_cast<std::size_t>(n_nodes));
  table.cdf.resize(static_cast<std::size_t>(n_nodes));

  auto advance = [&](std::size_t begin, std::size_t count) {
    i1 += simpson_chunk(f1, begin, count, step);
    i2 += simpson_chunk(f2, begin, count, step);
    i3 += simpson_chunk(f3, begin, count, step);
  };
  advance(0, static_cast<std::size_t>(head_steps));
  std::size_t grid_pos = static_cast<std::size_t>(head_steps);
  for (std::int64_t node = 0; node < n_nodes; ++node) {
    if (node > 0) {
      advance(grid_pos, static_cast<std::size_t>(per_node));
      grid_pos += static_cast<std::size_t>(per_node);
    }
    const double x = kGridRight - static_cast<double>(node) * kNodeSpacing;
    const double exponent = 0.5 * (i1 + (i3 - x * i2));
    const std::size_t slot = static_cast<std::size_t>(n_nodes - 1 - node);
    table.grid[slot] = x;
    table.cdf[slot] = std::exp(-exponent);
  }

  // Fritsch-Butland monotone cubic slopes.
  const std::size_t n = table.grid.size();
  table.slopes.assign(n, 0.0);
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    delta[i] = (table.cdf[i + 1] - table.cdf[i]) / (table.grid[i + 1] - table.grid[i]);
  }
  table.slopes[0] = delta[0];
  table.slopes[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      table.slopes[i] = 0.0;
    } else {
      table.slopes[i] = 2.0 * delta[i - 1] * delta[i] / (delta[i - 1] + delta[i]);
    }
  }
  return table;
}

const TracyWidomTable& TracyWidomTable::instance() {
  static const TracyWidomTable table = build();
  return table;
}

double TracyWidomTable::cdf_at(double x) const {
  if (x <= grid.front()) {
    return std::min(left_tail(x), cdf.front());
  }
  if (x >= grid.back()) {
    return std::max(1.0 - right_tail(x), cdf.back());
  }
  const double spacing = grid[1] - grid[0];
  auto idx = static_cast<std::size_t>((x - grid.front()) / spacing);
  if (idx + 1 >= grid.size()) idx = grid.size() - 2;
  const double h = grid[idx + 1] - grid[idx];
  const double t = (x - grid[idx]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * cdf[idx] + h10 * h * slopes[idx] + h01 * cdf[idx + 1] +
         h11 * h * slopes[idx + 1];
}

double f1_cdf(double x) { return TracyWidomTable::instance().cdf_at(x); }

NumericMatrix center_scale(const BinaryMatrix& m) {
  const std::int64_t n = m.n_rows;
  std::vector<std::int64_t> keep;
  keep.reserve(static_cast<std::size_t>(m.n_cols));
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    const std::int32_t c = m.col_sums[static_cast<std::size_t>(p)];
    if (c > 0 && c < n) keep.push_back(p);
  }
  if (keep.empty()) {
    throw ValidationError("no informative columns: every column is monomorphic");
  }
  NumericMatrix out(n, static_cast<std::int64_t>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::int64_t p = keep[k];
    const double theta =
        static_cast<double>(m.col_sums[static_cast<std::size_t>(p)]) /
        static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(theta * (1.0 - theta));
    for (std::int64_t i = 0; i < n; ++i) {
      out.at(i, static_cast<std::int64_t>(k)) =
          ((m.get(i, p) ? 1.0 : 0.0) - theta) * scale;
    }
  }
  return out;
}

NumericMatrix standardize_columns(const NumericMatrix& m) {
  const std::int64_t n = m.n_rows;
  std::vector<std::int64_t> keep;
  std::vector<double> means(static_cast<std::size_t>(m.n_cols));
  std::vector<double> scales(static_cast<std::size_t>(m.n_cols));
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) sum += m.at(i, p);
    const double mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double d = m.at(i, p) - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    if (var > 1e-20 * (1.0 + mean * mean)) {
      keep.push_back(p);
      means[static_cast<std::size_t>(p)] = mean;
      scales[static_cast<std::size_t>(p)] = 1.0 / std::sqrt(var);
    }
  }
  if (keep.empty()) {
    throw ValidationError("no informative columns: every column is constant");
  }
  NumericMatrix out(n, static_cast<std::int64_t>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const std::int64_t p = keep[k];
    for (std::int64_t i = 0; i < n; ++i) {
      out.at(i, static_cast<std::int64_t>(k)) =
          (m.at(i, p) - means[static_cast<std::size_t>(p)]) *
          scales[static_cast<std::size_t>(p)];
    }
  }
  return out;
}

double tw_normalize(double lambda_max, std::int64_t n, std::int64_t p) {
  if (n < 2 || p < 1) throw NumericError("tw_normalize needs N >= 2 and P >= 1");
  const double sn = std::sqrt(static_cast<double>(n - 1));
  const double sp = std::sqrt(static_cast<double>(p));
  const double mu = (sn + sp) * (sn + sp);
  const double sigma = (sn + sp) * std::cbrt(1.0 / sn + 1.0 / sp);
  return (lambda_max - mu) / sigma;
}

namespace {

TwTestResult tw_from_standardized(const NumericMatrix& x) {
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t n = x.n_rows;
  const std::int64_t p = x.n_cols;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      xm(x.values.data(), n, p);
  Eigen::MatrixXd gram = xm * xm.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  TwTestResult out;
  out.lambda_max = solver.eigenvalues().maxCoeff();
  out.normalized = tw_normalize(out.lambda_max, n, p);
  out.effective_p = p;
  const double cdf = f1_cdf(out.normalized);
  out.result.statistic = out.normalized;
  out.result.method = Method::tracy_widom;
  out.result.p_value = std::clamp(2.0 * std::min(cdf, 1.0 - cdf), 0.0, 1.0);
  out.result.elapsed_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
  return out;
}

}  // namespace

TwTestResult tw_test(const BinaryMatrix& m) {
  if (m.n_rows < 2) throw NumericError("tw_test needs at least 2 observations");
  return tw_from_standardized(center_scale(m));
}

TwTestResult tw_test(const NumericMatrix& m) {
  if (m.n_rows < 2) throw NumericError("tw_test needs at least 2 observations");
  return tw_from_standardized(standardize_columns(m));
}

}  // namespace vtest
