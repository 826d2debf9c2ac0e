#include "vtest/asymptotic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "vtest/error.hpp"
#include "vtest/special.hpp"

namespace vtest {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Asymptotic weights implied by the summed pair covariances. The covariance
// matrix over the C(N,2) pairs takes value cov2 on the diagonal, cov1 on
// pairs sharing one index and cov0 on disjoint pairs; its eigenvalues on the
// (N-1)- and (C(N-1,2)-1)-dimensional eigenspaces are
//   lam1 = cov2 + (N-4) cov1 - (N-3) cov0
//   lam2 = cov2 - 2 cov1 + cov0
// and the constant eigenvector carries exactly zero because each block's
// centered pair sums vanish identically.
void asymptotic_weights(const PermutationMoments& m, std::int64_t n, double* lam1,
                        double* lam2) {
  const double nn = static_cast<double>(n);
  *lam1 = m.mean_v + (nn - 4.0) * m.cov1 - (nn - 3.0) * m.cov0;
  *lam2 = m.mean_v - 2.0 * m.cov1 + m.cov0;
}

}  // namespace

ChiSquareMixture fit_mixture(const PermutationMoments& moments, std::int64_t n) {
  if (n < 4) {
    throw NumericError(
        "chi-square mixture needs N >= 4 (second component has no degrees of "
        "freedom); use the permutation test");
  }
  ChiSquareMixture mix;
  mix.df1 = n - 1;
  mix.df2 = (n - 1) * (n - 2) / 2 - 1;
  const double k_pairs = static_cast<double>(n) * (n - 1) / 2.0;
  mix.scale = 1.0 / k_pairs;
  if (!(moments.var_v > 0.0)) {
    throw NumericError(
        "degenerate permutation null (zero variance of V); use the permutation test");
  }
  const double df1 = static_cast<double>(mix.df1);
  const double df2 = static_cast<double>(mix.df2);
  const double m1 = moments.mean_v * k_pairs;
  const double m2 = moments.var_v * k_pairs * k_pairs / 2.0;  // a1^2 df1 + a2^2 df2
  // By Cauchy-Schwarz every mixture satisfies m2 >= m1^2/(df1+df2), with
  // equality at a1 = a2. Near-constant column frequencies push the two
  // weights together, and the finite-P variance can then undershoot that
  // floor by O(1/P); the closest admissible mixture is the tangency point,
  // which keeps the mean exact and errs on the wide side of the variance.
  const double m2_floor = m1 * m1 / (df1 + df2);
  if (m2 < m2_floor) {
    const double deficit = (m2_floor - m2) / m2_floor;
    if (deficit > 0.05) {
      throw NumericError(
          "permutation moments are too far from any chi-square mixture; use the "
          "permutation pathway");
    }
    mix.a1 = m1 / (df1 + df2);
    mix.a2 = mix.a1;
    return mix;
  }
  // Substitute a1 = (m1 - a2 df2)/df1 into the second moment equation.
  const double qa = df2 * df2 / df1 + df2;
  const double qb = -2.0 * m1 * df2 / df1;
  const double qc = m1 * m1 / df1 - m2;
  double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    if (disc > -1e-9 * (qb * qb + std::abs(4.0 * qa * qc))) {
      disc = 0.0;
    } else {
      throw NumericError(
          "moment system has no real root; use the permutation pathway");
    }
  }
  const double sq = std::sqrt(disc);
  double lam1 = 0.0;
  double lam2 = 0.0;
  asymptotic_weights(moments, n, &lam1, &lam2);
  const double tol = 1e-9 * (std::abs(m1) / df1 + std::abs(m1) / df2 + 1e-300);
  double best_a1 = 0.0;
  double best_a2 = 0.0;
  double best_dist = -1.0;
  for (const double root : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)}) {
    double a2 = root;
    double a1 = (m1 - a2 * df2) / df1;
    if (a1 < -tol || a2 < -tol) continue;
    a1 = std::max(a1, 0.0);
    a2 = std::max(a2, 0.0);
    const double d1 = a1 - lam1;
    const double d2 = a2 - lam2;
    const double dist = d1 * d1 + d2 * d2;
    if (best_dist < 0.0 || dist < best_dist) {
      best_dist = dist;
      best_a1 = a1;
      best_a2 = a2;
    }
  }
  if (best_dist < 0.0) {
    throw NumericError(
        "no non-negative mixture weights match the permutation moments; use the "
        "permutation pathway");
  }
  mix.a1 = best_a1;
  mix.a2 = best_a2;
  return mix;
}

namespace {

struct ImhofComponent {
  double weight;
  double df;
};

double imhof_theta(const ImhofComponent* comp, int n_comp, double t, double u) {
  double sum = -t * u;
  for (int i = 0; i < n_comp; ++i) {
    sum += comp[i].df * std::atan(comp[i].weight * u);
  }
  return 0.5 * sum;
}

double imhof_log_rho(const ImhofComponent* comp, int n_comp, double u) {
  double sum = 0.0;
  for (int i = 0; i < n_comp; ++i) {
    const double wu = comp[i].weight * u;
    sum += comp[i].df * std::log1p(wu * wu);
  }
  return 0.25 * sum;
}

double imhof_integrand(const ImhofComponent* comp, int n_comp, double t, double u) {
  if (u <= 0.0) {
    double slope = -t;
    for (int i = 0; i < n_comp; ++i) slope += comp[i].df * comp[i].weight;
    return 0.5 * slope;
  }
  const double log_rho = imhof_log_rho(comp, n_comp, u);
  if (log_rho > 700.0) return 0.0;
  return std::sin(imhof_theta(comp, n_comp, t, u)) / (u * std::exp(log_rho));
}

double adaptive_simpson(const ImhofComponent* comp, int n_comp, double t, double a,
                        double fa, double b, double fb, double fm, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = imhof_integrand(comp, n_comp, t, lm);
  const double frm = imhof_integrand(comp, n_comp, t, rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(comp, n_comp, t, a, fa, m, fm, flm, left, 0.5 * tol,
                          depth - 1) +
         adaptive_simpson(comp, n_comp, t, m, fm, b, fb, frm, right, 0.5 * tol,
                          depth - 1);
}

// Imhof's inversion integral I = int_0^inf sin(theta(u)) / (u rho(u)) du, so
// that P(Q > t) = 1/2 + I/pi.
double imhof_integral(const ImhofComponent* comp, int n_comp, double t) {
  // truncation point: for u >= U the integrand is bounded by
  // exp(-log_rho(U)) (U/u)^m / u with m = sum df_i/2 * (wU)^2/(1+(wU)^2),
  // giving a tail below exp(-log_rho(U)) / m.
  constexpr double kTol = 1e-9;
  double u_max = 1e-6;
  for (int iter = 0; iter < 500; ++iter) {
    double m_exp = 0.0;
    for (int i = 0; i < n_comp; ++i) {
      const double wu = comp[i].weight * u_max;
      m_exp += 0.5 * comp[i].df * (wu * wu) / (1.0 + wu * wu);
    }
    const double log_rho = imhof_log_rho(comp, n_comp, u_max);
    if (m_exp > 1e-12) {
      const double log_tail = -log_rho - std::log(m_exp);
      if (log_tail < std::log(kTol / 10.0)) break;
    }
    u_max *= 1.5;
  }
  // phase derivative bound keeps each panel under half an oscillation
  double phase = std::abs(t);
  for (int i = 0; i < n_comp; ++i) phase += comp[i].df * std::abs(comp[i].weight);
  const double panel_width =
      std::max(3.141592653589793 / std::max(0.5 * phase, 1e-12), u_max / 16384.0);
  const std::int64_t n_panels =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(u_max / panel_width)));
  const double width = u_max / static_cast<double>(n_panels);
  double total = 0.0;
  double a = 0.0;
  double fa = imhof_integrand(comp, n_comp, t, 0.0);
  for (std::int64_t k = 0; k < n_panels; ++k) {
    const double b = (k + 1 == n_panels) ? u_max : a + width;
    const double fb = imhof_integrand(comp, n_comp, t, b);
    const double m = 0.5 * (a + b);
    const double fm = imhof_integrand(comp, n_comp, t, m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson(comp, n_comp, t, a, fa, b, fb, fm, whole,
                              kTol * width / u_max, 36);
    a = b;
    fa = fb;
  }
  return total;
}

// Upper tail of a1 X + a2 Y in the mixture's own units (scale applied by the
// caller through t).
double mixture_sf_raw(const ChiSquareMixture& mix, double t_raw) {
  ImhofComponent comp[2];
  int n_comp = 0;
  if (mix.a1 > 0.0 && mix.df1 > 0) {
    comp[n_comp++] = {mix.a1, static_cast<double>(mix.df1)};
  }
  if (mix.a2 > 0.0 && mix.df2 > 0) {
    comp[n_comp++] = {mix.a2, static_cast<double>(mix.df2)};
  }
  if (n_comp == 0) return t_raw < 0.0 ? 1.0 : 0.0;  // point mass at zero
  if (t_raw <= 0.0) return 1.0;
  if (n_comp == 1) {
    return 1.0 - chi2_cdf(t_raw / comp[0].weight, comp[0].df);
  }
  const double sf = 0.5 + imhof_integral(comp, n_comp, t_raw) / 3.141592653589793;
  return std::clamp(sf, 0.0, 1.0);
}

}  // namespace

double mixture_sf(const ChiSquareMixture& mix, double t) {
  return mixture_sf_raw(mix, t / mix.scale);
}

double mixture_cdf(const ChiSquareMixture& mix, double t) {
  return 1.0 - mixture_sf(mix, t);
}

TestResult chi_square_test(double v_obs, const PermutationMoments& moments) {
  const auto start = Clock::now();
  const ChiSquareMixture mix = fit_mixture(moments, moments.n);
  TestResult result;
  result.statistic = v_obs;
  result.method = Method::chi_square;
  result.p_value = mixture_sf(mix, v_obs);
  result.elapsed_ms = elapsed_ms_since(start);
  return result;
}

TestResult normal_test(const PermutationMoments& moments, double v_obs) {
  const auto start = Clock::now();
  if (!(moments.var_v > 0.0)) {
    throw NumericError("normal approximation needs a non-degenerate null (var > 0)");
  }
  TestResult result;
  result.statistic = v_obs;
  result.method = Method::normal;
  const double z = (v_obs - moments.mean_v) / std::sqrt(moments.var_v);
  result.p_value = normal_cdf(-z);
  result.elapsed_ms = elapsed_ms_since(start);
  return result;
}

TestResult auto_test(const BinaryMatrix& m, const ResamplingPlan& plan,
                     const AutoPolicy& policy) {
  if (m.n_cols >= policy.min_independent) {
    try {
      const double norm = static_cast<double>(m.n_cols);
      const VValue v = v_statistic(hamming_pairwise(m), norm);
      return chi_square_test(v.v, permutation_moments(m, norm));
    } catch (const NumericError&) {
      // mixture unavailable (N < 4 or degenerate null): resample instead
    }
  }
  return permutation_test(m, plan);
}

TestResult auto_test(const BinaryMatrix& m, const BlockPartition& part, Metric metric,
                     const ResamplingPlan& plan, const AutoPolicy& policy) {
  const BlockDistanceSet bd = block_distances(m, part, metric);
  return auto_test(bd, plan, static_cast<double>(m.n_cols), policy);
}

TestResult auto_test(const NumericMatrix& m, const BlockPartition& part, Metric metric,
                     const ResamplingPlan& plan, const AutoPolicy& policy) {
  const BlockDistanceSet bd = block_distances(m, part, metric);
  return auto_test(bd, plan, static_cast<double>(m.n_cols), policy);
}

TestResult auto_test(const BlockDistanceSet& bd, const ResamplingPlan& plan, double norm,
                     const AutoPolicy& policy) {
  if (bd.n_blocks() >= policy.min_independent) {
    try {
      const VValue v = v_statistic(bd.total(), norm);
      return chi_square_test(v.v, permutation_moments(bd, norm));
    } catch (const NumericError&) {
    }
  }
  return permutation_test(bd, plan, norm);
}

}  // namespace vtest
