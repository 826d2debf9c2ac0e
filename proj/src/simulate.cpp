#include "vtest/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "vtest/error.hpp"
#include "vtest/parallel.hpp"
#include "vtest/special.hpp"

namespace vtest {

NullKind null_kind_from_string(const std::string& name) {
  if (name == "low" || name == "low_freq") return NullKind::low_freq;
  if (name == "varying" || name == "varying_freq") return NullKind::varying_freq;
  if (name == "high" || name == "high_freq") return NullKind::high_freq;
  if (name == "custom") return NullKind::custom;
  if (name == "mixture" || name == "mixture_gaussian") return NullKind::mixture_gaussian;
  throw ValidationError("unknown null kind '" + name +
                        "' (expected low, varying, high, custom or mixture-gaussian)");
}

const char* null_kind_name(NullKind k) {
  switch (k) {
    case NullKind::low_freq: return "low";
    case NullKind::varying_freq: return "varying";
    case NullKind::high_freq: return "high";
    case NullKind::custom: return "custom";
    case NullKind::mixture_gaussian: return "mixture_gaussian";
  }
  return "?";
}

TestKind test_kind_from_string(const std::string& name) {
  if (name == "v" || name == "v-auto" || name == "v_auto") return TestKind::v_auto;
  if (name == "v-perm" || name == "v_perm") return TestKind::v_perm;
  if (name == "v-chisq" || name == "v_chisq") return TestKind::v_chisq;
  if (name == "v-normal" || name == "v_normal") return TestKind::v_normal;
  if (name == "v-boot" || name == "v_boot") return TestKind::v_boot;
  if (name == "tw") return TestKind::tw;
  throw ValidationError("unknown test '" + name +
                        "' (expected v, v-perm, v-chisq, v-normal, v-boot or tw)");
}

const char* test_kind_name(TestKind k) {
  switch (k) {
    case TestKind::v_auto: return "v";
    case TestKind::v_perm: return "v-perm";
    case TestKind::v_chisq: return "v-chisq";
    case TestKind::v_normal: return "v-normal";
    case TestKind::v_boot: return "v-boot";
    case TestKind::tw: return "tw";
  }
  return "?";
}

namespace {

void check_null_config(const NullModelConfig& cfg) {
  if (cfg.n < 1 || cfg.p < 1) {
    throw ValidationError("null config: N and P must be positive");
  }
  if (cfg.kind == NullKind::custom &&
      static_cast<std::int64_t>(cfg.theta.size()) != cfg.p) {
    throw ValidationError("null config: custom kind needs a theta vector of length P");
  }
  for (double t : cfg.theta) {
    if (!(t >= 0.0 && t <= 1.0)) {
      throw ValidationError("null config: theta entries must lie in [0,1]");
    }
  }
}

std::pair<double, double> kind_range(NullKind kind) {
  switch (kind) {
    case NullKind::low_freq: return {0.1, 0.2};
    case NullKind::varying_freq: return {0.2, 0.55};
    case NullKind::high_freq: return {0.8, 0.9};
    default: return {0.0, 1.0};
  }
}

BinaryMatrix product_bernoulli(std::int64_t n, const std::vector<double>& theta,
                               Rng& rng) {
  BinaryMatrix m = BinaryMatrix::zeros(n, static_cast<std::int64_t>(theta.size()));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < theta.size(); ++p) {
      if (rng.bernoulli(theta[p])) {
        m.set(i, static_cast<std::int64_t>(p), true);
        m.col_sums[p]++;
      }
    }
  }
  return m;
}

}  // namespace

Dataset gen_null(const NullModelConfig& cfg, Rng& rng) {
  check_null_config(cfg);
  if (cfg.kind == NullKind::mixture_gaussian) {
    NumericMatrix m(cfg.n, cfg.p);
    for (double& v : m.values) {
      const double center = rng.bernoulli(0.5) ? 2.0 : -2.0;
      v = center + rng.normal();
    }
    return m;
  }
  std::vector<double> theta;
  if (cfg.kind == NullKind::custom) {
    theta = cfg.theta;
  } else {
    const auto [lo, hi] = kind_range(cfg.kind);
    theta.resize(static_cast<std::size_t>(cfg.p));
    for (double& t : theta) t = rng.uniform(lo, hi);
  }
  return product_bernoulli(cfg.n, theta, rng);
}

namespace {

void check_scenario(const ScenarioConfig& cfg) {
  if (cfg.k < 1) throw ValidationError("scenario: K must be >= 1");
  if (static_cast<std::int32_t>(cfg.sizes.size()) != cfg.k) {
    throw ValidationError("scenario: sizes must list one count per population");
  }
  for (std::int64_t s : cfg.sizes) {
    if (s < 1) throw ValidationError("scenario: population sizes must be positive");
  }
  if (cfg.p < 1) throw ValidationError("scenario: P must be positive");
  if (!(cfg.epsilon > 0.0)) throw ValidationError("scenario: epsilon must be positive");
  if (!(cfg.discern_frac > 0.0 && cfg.discern_frac <= 1.0)) {
    throw ValidationError("scenario: discern_frac must lie in (0,1]");
  }
  if (!(cfg.flip_frac >= 0.0 && cfg.flip_frac <= 1.0)) {
    throw ValidationError("scenario: flip_frac must lie in [0,1]");
  }
  if (!cfg.centers.empty() &&
      static_cast<std::int32_t>(cfg.centers.size()) != cfg.k) {
    throw ValidationError("scenario: centers must list one value per population");
  }
}

double default_center(std::int32_t k) {
  // populations numbered 1..K: alternation plus a spread for K > 2
  return 0.5 + 0.075 * (k % 2 == 0 ? 1.0 : -1.0) + 0.05 * (k / 2);
}

void check_window(double center, double epsilon) {
  if (center - epsilon < 0.0 || center + epsilon > 1.0) {
    std::ostringstream msg;
    msg << "scenario: frequency window [" << center - epsilon << ", "
        << center + epsilon << "] leaves [0,1]; use a smaller epsilon";
    throw ValidationError(msg.str());
  }
}

}  // namespace

GeneratedSample gen_stratified(const ScenarioConfig& cfg, Rng& rng) {
  check_scenario(cfg);
  const std::int64_t n_total = std::accumulate(cfg.sizes.begin(), cfg.sizes.end(),
                                               std::int64_t{0});
  const std::int64_t n_discern =
      std::min<std::int64_t>(cfg.p, std::llround(cfg.discern_frac * cfg.p));

  std::vector<double> centers(static_cast<std::size_t>(cfg.k));
  for (std::int32_t k = 0; k < cfg.k; ++k) {
    centers[static_cast<std::size_t>(k)] =
        cfg.centers.empty() ? default_center(k + 1) : cfg.centers[static_cast<std::size_t>(k)];
    check_window(centers[static_cast<std::size_t>(k)], cfg.epsilon);
    if (cfg.heterogeneity == Heterogeneity::balanced) {
      check_window(1.0 - centers[static_cast<std::size_t>(k)], cfg.epsilon);
    }
  }

  // theta[k][j]: discerning features get population-specific draws (balanced
  // mode mirrors every second window around 0.5); the rest share one draw.
  std::vector<std::vector<double>> theta(
      static_cast<std::size_t>(cfg.k),
      std::vector<double>(static_cast<std::size_t>(cfg.p)));
  for (std::int64_t j = 0; j < cfg.p; ++j) {
    if (j < n_discern) {
      const bool mirrored =
          cfg.heterogeneity == Heterogeneity::balanced && (j % 2 == 1);
      for (std::int32_t k = 0; k < cfg.k; ++k) {
        const double c = centers[static_cast<std::size_t>(k)];
        const double center = mirrored ? 1.0 - c : c;
        theta[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] =
            rng.uniform(center - cfg.epsilon, center + cfg.epsilon);
      }
    } else {
      const double shared = rng.uniform(std::max(0.0, 0.5 - cfg.epsilon),
                                        std::min(1.0, 0.5 + cfg.epsilon));
      for (std::int32_t k = 0; k < cfg.k; ++k) {
        theta[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = shared;
      }
    }
  }

  BinaryMatrix data = BinaryMatrix::zeros(n_total, cfg.p);
  std::vector<std::int32_t> labels(static_cast<std::size_t>(n_total));
  std::int64_t row = 0;
  for (std::int32_t k = 0; k < cfg.k; ++k) {
    for (std::int64_t i = 0; i < cfg.sizes[static_cast<std::size_t>(k)]; ++i, ++row) {
      labels[static_cast<std::size_t>(row)] = k;
      for (std::int64_t j = 0; j < cfg.p; ++j) {
        if (rng.bernoulli(theta[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)])) {
          data.set(row, j, true);
        }
      }
    }
  }

  // column flipping: complement a random fraction of the columns
  const std::int64_t n_flip = std::llround(cfg.flip_frac * cfg.p);
  if (n_flip > 0) {
    std::vector<std::int64_t> cols(static_cast<std::size_t>(cfg.p));
    std::iota(cols.begin(), cols.end(), 0);
    for (std::int64_t k = 0; k < n_flip; ++k) {
      const std::uint64_t pick =
          static_cast<std::uint64_t>(k) + rng.below(static_cast<std::uint64_t>(cfg.p - k));
      std::swap(cols[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(pick)]);
      for (std::int64_t i = 0; i < n_total; ++i) {
        const std::int64_t j = cols[static_cast<std::size_t>(k)];
        data.set(i, j, !data.get(i, j));
      }
    }
  }

  // shuffle rows so the emitted matrix carries no ordering signal
  std::vector<std::int64_t> order(static_cast<std::size_t>(n_total));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  BinaryMatrix shuffled = BinaryMatrix::zeros(n_total, cfg.p);
  std::vector<std::int32_t> shuffled_labels(static_cast<std::size_t>(n_total));
  for (std::int64_t i = 0; i < n_total; ++i) {
    const std::int64_t src = order[static_cast<std::size_t>(i)];
    shuffled_labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(src)];
    const std::uint64_t* src_words = data.row_words(src);
    std::uint64_t* dst_words = shuffled.row_words(i);
    std::copy(src_words, src_words + data.words_per_row, dst_words);
  }
  shuffled.recompute_col_sums();
  return {std::move(shuffled), std::move(shuffled_labels)};
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open file");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::replace(line.begin(), line.end(), '=', ' ');
    std::istringstream fields(line);
    std::string key;
    if (!(fields >> key)) continue;
    std::string value;
    std::string token;
    while (fields >> token) {
      if (!value.empty()) value += ' ';
      value += token;
    }
    if (value.empty()) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": option '" + key +
                            "' has no value");
    }
    out.emplace_back(key, value);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::string copy = text;
  std::replace(copy.begin(), copy.end(), ',', ' ');
  std::istringstream in(copy);
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  return out;
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
  try {
    return std::stoll(text);
  } catch (...) {
    throw ValidationError("option '" + key + "': cannot parse integer from '" + text + "'");
  }
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    return std::stod(text);
  } catch (...) {
    throw ValidationError("option '" + key + "': cannot parse number from '" + text + "'");
  }
}

}  // namespace

NullModelConfig parse_null_config(const std::string& path) {
  NullModelConfig cfg;
  for (const auto& [key, value] : parse_key_values(path)) {
    if (key == "kind") {
      cfg.kind = null_kind_from_string(value);
    } else if (key == "N" || key == "n") {
      cfg.n = parse_int(value, key);
    } else if (key == "P" || key == "p") {
      cfg.p = parse_int(value, key);
    } else if (key == "theta") {
      cfg.theta = parse_double_list(value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else {
      throw ValidationError(path + ": unknown null-config option '" + key + "'");
    }
  }
  check_null_config(cfg);
  return cfg;
}

ScenarioConfig parse_scenario_config(const std::string& path) {
  ScenarioConfig cfg;
  cfg.sizes.clear();
  for (const auto& [key, value] : parse_key_values(path)) {
    if (key == "K" || key == "k") {
      cfg.k = static_cast<std::int32_t>(parse_int(value, key));
    } else if (key == "sizes") {
      cfg.sizes.clear();
      for (double v : parse_double_list(value)) {
        cfg.sizes.push_back(static_cast<std::int64_t>(std::llround(v)));
      }
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, key);
    } else if (key == "P" || key == "p") {
      cfg.p = parse_int(value, key);
    } else if (key == "discern_frac") {
      cfg.discern_frac = parse_double(value, key);
    } else if (key == "heterogeneity") {
      if (value == "directional") {
        cfg.heterogeneity = Heterogeneity::directional;
      } else if (value == "balanced") {
        cfg.heterogeneity = Heterogeneity::balanced;
      } else {
        throw ValidationError("option 'heterogeneity': expected directional or balanced");
      }
    } else if (key == "flip_frac") {
      cfg.flip_frac = parse_double(value, key);
    } else if (key == "centers") {
      cfg.centers = parse_double_list(value);
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else {
      throw ValidationError(path + ": unknown scenario option '" + key + "'");
    }
  }
  check_scenario(cfg);
  return cfg;
}

TestResult run_test(TestKind kind, const BinaryMatrix& data, std::uint64_t seed,
                    const TestOptions& opts) {
  ResamplingPlan plan;
  plan.resamples = opts.resamples;
  plan.seed = seed;
  plan.p_value_type = opts.p_value_type;
  plan.threads = opts.threads;
  switch (kind) {
    case TestKind::v_auto: return auto_test(data, plan, opts.policy);
    case TestKind::v_perm: return permutation_test(data, plan);
    case TestKind::v_boot: return bootstrap_test(data, plan);
    case TestKind::v_chisq: {
      const double norm = static_cast<double>(data.n_cols);
      const VValue v = v_statistic(hamming_pairwise(data), norm);
      return chi_square_test(v.v, permutation_moments(data, norm));
    }
    case TestKind::v_normal: {
      const double norm = static_cast<double>(data.n_cols);
      const VValue v = v_statistic(hamming_pairwise(data), norm);
      return normal_test(permutation_moments(data, norm), v.v);
    }
    case TestKind::tw: return tw_test(data).result;
  }
  throw ValidationError("unknown test kind");
}

TestResult run_test(TestKind kind, const NumericMatrix& data, std::uint64_t seed,
                    const TestOptions& opts) {
  if (kind == TestKind::tw) return tw_test(data).result;
  // V-family tests on real-valued data go through the general pathway:
  // squared-Euclidean distances over singleton blocks.
  const BlockPartition part = BlockPartition::singletons(data.n_cols);
  const BlockDistanceSet bd = block_distances(data, part, Metric::euclidean_sq);
  const double norm = static_cast<double>(data.n_cols);
  ResamplingPlan plan;
  plan.resamples = opts.resamples;
  plan.seed = seed;
  plan.p_value_type = opts.p_value_type;
  plan.threads = opts.threads;
  switch (kind) {
    case TestKind::v_auto: return auto_test(bd, plan, norm, opts.policy);
    case TestKind::v_perm: return permutation_test(bd, plan, norm);
    case TestKind::v_chisq: {
      const VValue v = v_statistic(bd.total(), norm);
      return chi_square_test(v.v, permutation_moments(bd, norm));
    }
    case TestKind::v_normal: {
      const VValue v = v_statistic(bd.total(), norm);
      return normal_test(permutation_moments(bd, norm), v.v);
    }
    case TestKind::v_boot:
      throw ValidationError("the parametric bootstrap needs binary data");
    case TestKind::tw: break;
  }
  throw ValidationError("unknown test kind");
}

TestResult run_test(TestKind kind, const Dataset& data, std::uint64_t seed,
                    const TestOptions& opts) {
  if (std::holds_alternative<BinaryMatrix>(data)) {
    return run_test(kind, std::get<BinaryMatrix>(data), seed, opts);
  }
  return run_test(kind, std::get<NumericMatrix>(data), seed, opts);
}

namespace {

// Replicate i draws its dataset from stream (seed, 2i) and seeds the test
// with stream (seed, 2i+1).
template <typename MakeDataset>
std::vector<double> replicate_p_values(MakeDataset&& make, TestKind kind,
                                       std::int64_t replicates, std::uint64_t seed,
                                       const TestOptions& opts, int threads) {
  if (replicates < 1) throw ValidationError("replicate count must be >= 1");
  std::vector<double> p(static_cast<std::size_t>(replicates));
  parallel_for(replicates, threads, [&](std::int64_t begin, std::int64_t end) {
    for (std::int64_t i = begin; i < end; ++i) {
      Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(2 * i));
      const auto data = make(rng);
      const std::uint64_t test_seed =
          derive_stream_seed(seed, static_cast<std::uint64_t>(2 * i + 1));
      p[static_cast<std::size_t>(i)] = run_test(kind, data, test_seed, opts).p_value;
    }
  });
  return p;
}

}  // namespace

std::vector<double> null_p_values(const NullModelConfig& cfg, TestKind kind,
                                  std::int64_t replicates, std::uint64_t seed,
                                  const TestOptions& opts, int threads) {
  check_null_config(cfg);
  return replicate_p_values([&cfg](Rng& rng) { return gen_null(cfg, rng); }, kind,
                            replicates, seed, opts, threads);
}

std::vector<double> alt_p_values(const ScenarioConfig& cfg, TestKind kind,
                                 std::int64_t replicates, std::uint64_t seed,
                                 const TestOptions& opts, int threads) {
  check_scenario(cfg);
  return replicate_p_values(
      [&cfg](Rng& rng) { return Dataset(gen_stratified(cfg, rng).data); }, kind,
      replicates, seed, opts, threads);
}

namespace {

RateEstimate rate_from_p(const std::vector<double>& p, double alpha) {
  RateEstimate est;
  est.alpha = alpha;
  est.replicates = static_cast<std::int64_t>(p.size());
  for (double v : p) {
    if (v <= alpha) est.rejections++;
  }
  est.rate = static_cast<double>(est.rejections) / static_cast<double>(est.replicates);
  const auto [lo, hi] = binomial_ci(est.rejections, est.replicates);
  est.ci_lo = lo;
  est.ci_hi = hi;
  return est;
}

}  // namespace

RateEstimate estimate_fpr(const NullModelConfig& cfg, TestKind kind, double alpha,
                          std::int64_t replicates, std::uint64_t seed,
                          const TestOptions& opts, int threads) {
  return rate_from_p(null_p_values(cfg, kind, replicates, seed, opts, threads), alpha);
}

RateEstimate estimate_power(const ScenarioConfig& cfg, TestKind kind, double alpha,
                            std::int64_t replicates, std::uint64_t seed,
                            const TestOptions& opts, int threads) {
  return rate_from_p(alt_p_values(cfg, kind, replicates, seed, opts, threads), alpha);
}

RocResult roc_from_p_values(const std::vector<double>& null_p,
                            const std::vector<double>& alt_p) {
  if (null_p.empty() || alt_p.empty()) {
    throw ValidationError("roc needs p-values in both arms");
  }
  std::vector<double> thresholds;
  thresholds.reserve(null_p.size() + alt_p.size());
  thresholds.insert(thresholds.end(), null_p.begin(), null_p.end());
  thresholds.insert(thresholds.end(), alt_p.begin(), alt_p.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<double> sorted_null = null_p;
  std::vector<double> sorted_alt = alt_p;
  std::sort(sorted_null.begin(), sorted_null.end());
  std::sort(sorted_alt.begin(), sorted_alt.end());
  const auto frac_leq = [](const std::vector<double>& sorted, double alpha) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), alpha);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  };

  RocResult roc;
  roc.replicates = static_cast<std::int64_t>(null_p.size());
  roc.roc_points.emplace_back(0.0, 0.0);
  for (double alpha : thresholds) {
    roc.roc_points.emplace_back(frac_leq(sorted_null, alpha), frac_leq(sorted_alt, alpha));
  }
  if (roc.roc_points.back() != std::make_pair(1.0, 1.0)) {
    roc.roc_points.emplace_back(1.0, 1.0);
  }
  double auc = 0.0;
  for (std::size_t i = 1; i < roc.roc_points.size(); ++i) {
    const auto& [x0, y0] = roc.roc_points[i - 1];
    const auto& [x1, y1] = roc.roc_points[i];
    auc += (x1 - x0) * 0.5 * (y0 + y1);
  }
  roc.auroc = auc;
  return roc;
}

RocResult roc_auc(const NullModelConfig& null_cfg, const ScenarioConfig& alt_cfg,
                  TestKind kind, std::int64_t replicates, std::uint64_t seed,
                  const TestOptions& opts, int threads) {
  const auto null_p = null_p_values(null_cfg, kind, replicates,
                                    derive_stream_seed(seed, 0x6e756c6cull), opts, threads);
  const auto alt_p = alt_p_values(alt_cfg, kind, replicates,
                                  derive_stream_seed(seed, 0x616c7421ull), opts, threads);
  return roc_from_p_values(null_p, alt_p);
}

}  // namespace vtest
