#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vtest/asymptotic.hpp"
#include "vtest/matrix.hpp"
#include "vtest/result.hpp"
#include "vtest/rng.hpp"
#include "vtest/tracy_widom.hpp"

namespace vtest {

enum class NullKind { low_freq, varying_freq, high_freq, custom, mixture_gaussian };

NullKind null_kind_from_string(const std::string& name);
const char* null_kind_name(NullKind k);

/// Null generators. Binary kinds draw one frequency vector theta per dataset
/// from the kind's range (low [0.1,0.2], varying [0.2,0.55], high [0.8,0.9])
/// and then N i.i.d. product-Bernoulli rows. mixture_gaussian draws every
/// entry i.i.d. from the two-component mixture 0.5 N(-2,1) + 0.5 N(2,1):
/// heterogeneous-looking but exchangeable.
struct NullModelConfig {
  NullKind kind = NullKind::varying_freq;
  std::int64_t n = 0;
  std::int64_t p = 0;
  std::vector<double> theta;  // custom kind only
  std::uint64_t seed = 0;
};

enum class Heterogeneity { directional, balanced };

/// Hierarchical non-exchangeable model: K populations with window centers
/// 0.5 + 0.075 (-1)^k + 0.05 floor(k/2) (k = 1..K), theta_j per population
/// drawn uniformly from [center - epsilon, center + epsilon] for the
/// discerning features; the remaining features share one theta_j (window
/// centered at 0.5) across populations. Explicit `centers` override the
/// default window centers. `balanced` mirrors the window of every second
/// discerning feature around 0.5 so row-sum distributions roughly match
/// across populations. flip_frac complements that fraction of columns after
/// generation. Rows are emitted in shuffled order.
struct ScenarioConfig {
  std::int32_t k = 2;
  std::vector<std::int64_t> sizes;
  double epsilon = 0.2;
  std::int64_t p = 0;
  double discern_frac = 1.0;
  Heterogeneity heterogeneity = Heterogeneity::directional;
  double flip_frac = 0.0;
  std::vector<double> centers;  // optional, length K
  std::uint64_t seed = 0;
};

using Dataset = std::variant<BinaryMatrix, NumericMatrix>;

struct GeneratedSample {
  BinaryMatrix data;
  std::vector<std::int32_t> labels;  // population of each emitted row
};

Dataset gen_null(const NullModelConfig& cfg, Rng& rng);
GeneratedSample gen_stratified(const ScenarioConfig& cfg, Rng& rng);

/// One option per line, `key = value` or `key value`; '#' starts a comment.
NullModelConfig parse_null_config(const std::string& path);
ScenarioConfig parse_scenario_config(const std::string& path);

enum class TestKind { v_auto, v_perm, v_chisq, v_normal, v_boot, tw };

TestKind test_kind_from_string(const std::string& name);
const char* test_kind_name(TestKind k);

struct TestOptions {
  std::int64_t resamples = 2000;
  PValueType p_value_type = PValueType::valid;
  AutoPolicy policy;
  int threads = 1;  // threads inside a single test; harnesses parallelize replicates
};

/// Runs a test on one dataset. Numeric data routes V-family tests through the
/// general pathway: squared-Euclidean distances over singleton blocks.
TestResult run_test(TestKind kind, const BinaryMatrix& data, std::uint64_t seed,
                    const TestOptions& opts);
TestResult run_test(TestKind kind, const NumericMatrix& data, std::uint64_t seed,
                    const TestOptions& opts);
TestResult run_test(TestKind kind, const Dataset& data, std::uint64_t seed,
                    const TestOptions& opts);

struct RateEstimate {
  double rate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
  std::int64_t rejections = 0;
  std::int64_t replicates = 0;
  double alpha = 0.05;
};

RateEstimate estimate_fpr(const NullModelConfig& cfg, TestKind kind, double alpha,
                          std::int64_t replicates, std::uint64_t seed,
                          const TestOptions& opts = {}, int threads = 0);

RateEstimate estimate_power(const ScenarioConfig& cfg, TestKind kind, double alpha,
                            std::int64_t replicates, std::uint64_t seed,
                            const TestOptions& opts = {}, int threads = 0);

struct RocResult {
  double auroc = 0.5;
  std::vector<std::pair<double, double>> roc_points;  // (fpr, tpr), (0,0) .. (1,1)
  std::int64_t replicates = 0;                        // per arm
};

/// p-values on `replicates` null and `replicates` alternative datasets; the
/// ROC is traced by sliding the significance level from 0 to 1 and the AUROC
/// computed by the trapezoid rule.
RocResult roc_auc(const NullModelConfig& null_cfg, const ScenarioConfig& alt_cfg,
                  TestKind kind, std::int64_t replicates, std::uint64_t seed,
                  const TestOptions& opts = {}, int threads = 0);

/// Replicate p-values under each arm (exposed for diagnostics and tables).
std::vector<double> null_p_values(const NullModelConfig& cfg, TestKind kind,
                                  std::int64_t replicates, std::uint64_t seed,
                                  const TestOptions& opts = {}, int threads = 0);
std::vector<double> alt_p_values(const ScenarioConfig& cfg, TestKind kind,
                                 std::int64_t replicates, std::uint64_t seed,
                                 const TestOptions& opts = {}, int threads = 0);

/// ROC curve + AUROC from two p-value samples.
RocResult roc_from_p_values(const std::vector<double>& null_p,
                            const std::vector<double>& alt_p);

}  // namespace vtest
