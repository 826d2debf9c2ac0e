// vtest: exchangeability / feature-group-independence testing toolkit.
//
// Subcommands: test, tw, simulate, fpr, power, roc, bench, f1-table.
// Exit codes: 0 success, 1 internal failure, 2 usage or validation error.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vtest/asymptotic.hpp"
#include "vtest/error.hpp"
#include "vtest/io.hpp"
#include "vtest/parallel.hpp"
#include "vtest/simulate.hpp"
#include "vtest/tracy_widom.hpp"
#include "vtest/vstat.hpp"

using json = nlohmann::ordered_json;
using namespace vtest;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string join_command(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i) cmd += ' ';
    const std::string arg = argv[i];
    cmd += arg.find(' ') == std::string::npos ? arg : "'" + arg + "'";
  }
  return cmd;
}

std::int64_t env_default_resamples() {
  if (const char* raw = std::getenv("VTEST_R")) {
    try {
      const std::int64_t r = std::stoll(raw);
      if (r >= 1) return r;
    } catch (...) {
    }
  }
  return 2000;
}

int env_default_threads() {
  if (const char* raw = std::getenv("VTEST_THREADS")) {
    try {
      return std::stoi(raw);
    } catch (...) {
    }
  }
  return 0;  // all available cores
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw ValidationError(out_path + ": cannot open file for writing");
  out << text;
}

BinaryMatrix filter_min_freq(const BinaryMatrix& m, double min_freq) {
  std::vector<std::int64_t> keep;
  for (std::int64_t p = 0; p < m.n_cols; ++p) {
    const double c = static_cast<double>(m.col_sums[static_cast<std::size_t>(p)]);
    const double maf = std::min(c, static_cast<double>(m.n_rows) - c) /
                       static_cast<double>(m.n_rows);
    if (maf >= min_freq) keep.push_back(p);
  }
  if (keep.empty()) {
    throw ValidationError("column filter removed every feature; lower --min-freq");
  }
  BinaryMatrix out = BinaryMatrix::zeros(m.n_rows, static_cast<std::int64_t>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    for (std::int64_t i = 0; i < m.n_rows; ++i) {
      if (m.get(i, keep[k])) out.set(i, static_cast<std::int64_t>(k), true);
    }
  }
  out.recompute_col_sums();
  return out;
}

json result_to_json(const TestResult& r) {
  json out;
  out["method"] = method_name(r.method);
  out["statistic"] = r.statistic;
  out["p_value"] = r.p_value;
  if (r.resamples) {
    out["resamples"] = *r.resamples;
  } else {
    out["resamples"] = nullptr;
  }
  if (r.seed) {
    out["seed"] = *r.seed;
  } else {
    out["seed"] = nullptr;
  }
  out["elapsed_ms"] = r.elapsed_ms;
  return out;
}

struct TestCmd {
  std::string input;
  std::string distances;
  std::string format = "delimited";
  std::string blocks;
  std::string metric = "hamming";
  std::string method = "auto";
  std::int64_t resamples = env_default_resamples();
  std::uint64_t seed = 0;
  std::string pvalue = "valid";
  std::optional<double> binarize_threshold;
  std::optional<double> min_freq;
  std::optional<double> norm;
  std::int64_t auto_threshold = 50;
  int threads = env_default_threads();
  std::string out;
};

int run_test_command(const TestCmd& cmd, const std::string& command_line) {
  if (cmd.input.empty() == cmd.distances.empty()) {
    throw ValidationError("exactly one of --input or --distances is required");
  }
  ResamplingPlan plan;
  plan.resamples = cmd.resamples;
  plan.seed = cmd.seed;
  plan.p_value_type = p_value_type_from_string(cmd.pvalue);
  plan.threads = cmd.threads;
  AutoPolicy policy;
  policy.min_independent = cmd.auto_threshold;

  json report;
  report["tool"] = "vtest";
  report["version"] = kVersion;
  report["command"] = command_line;
  json input_info;
  json test_info;
  test_info["method"] = cmd.method;
  test_info["resamples"] = cmd.resamples;
  test_info["seed"] = cmd.seed;
  test_info["p_value_type"] = cmd.pvalue;
  test_info["auto_threshold"] = cmd.auto_threshold;
  test_info["threads"] = cmd.threads;

  TestResult result;

  if (!cmd.distances.empty()) {
    for (const auto& [set, name] :
         {std::pair{!cmd.blocks.empty(), "--blocks"},
          std::pair{cmd.binarize_threshold.has_value(), "--binarize-threshold"},
          std::pair{cmd.min_freq.has_value(), "--min-freq"}}) {
      if (set) {
        throw ValidationError(std::string(name) +
                              " cannot be combined with --distances (the manifest "
                              "already fixes the per-block distances)");
      }
    }
    if (cmd.method == "boot") {
      throw ValidationError(
          "--method boot needs raw binary data; it cannot run on cached distances");
    }
    const BlockDistanceSet bd = load_block_distance_set(cmd.distances);
    const double norm = cmd.norm.value_or(1.0);
    input_info["distances"] = cmd.distances;
    input_info["n"] = bd.n;
    input_info["b"] = bd.n_blocks();
    test_info["norm"] = norm;
    if (cmd.method == "auto") {
      result = auto_test(bd, plan, norm, policy);
    } else if (cmd.method == "perm") {
      result = permutation_test(bd, plan, norm);
    } else if (cmd.method == "chisq") {
      const VValue v = v_statistic(bd.total(), norm);
      result = chi_square_test(v.v, permutation_moments(bd, norm));
    } else if (cmd.method == "normal") {
      const VValue v = v_statistic(bd.total(), norm);
      result = normal_test(permutation_moments(bd, norm), v.v);
    } else {
      throw ValidationError("unknown --method '" + cmd.method + "'");
    }
  } else {
    const MatrixFormat format = cmd.format == "dosage" ? MatrixFormat::genotype_dosage
                                                       : MatrixFormat::delimited;
    const NumericMatrix raw = load_matrix(cmd.input, format);
    input_info["path"] = cmd.input;

    std::optional<BinaryMatrix> binary;
    std::optional<NumericMatrix> numeric;
    if (cmd.binarize_threshold) {
      binary = binarize(raw, *cmd.binarize_threshold);
      test_info["binarize_threshold"] = *cmd.binarize_threshold;
    } else if (is_binary01(raw)) {
      binary = to_binary(raw);
    } else {
      numeric = raw;
    }
    if (cmd.min_freq) {
      if (!binary) {
        throw ValidationError(
            "--min-freq filters binary columns; binarize the data first");
      }
      binary = filter_min_freq(*binary, *cmd.min_freq);
      test_info["min_freq"] = *cmd.min_freq;
    }
    const std::int64_t n = binary ? binary->n_rows : numeric->n_rows;
    const std::int64_t p = binary ? binary->n_cols : numeric->n_cols;
    input_info["n"] = n;
    input_info["p"] = p;
    const double norm = cmd.norm.value_or(static_cast<double>(p));
    test_info["norm"] = norm;

    const Metric metric = metric_from_string(cmd.metric);
    if (!cmd.blocks.empty()) {
      const BlockPartition part = load_block_partition(cmd.blocks, p);
      input_info["blocks"] = cmd.blocks;
      input_info["b"] = part.n_blocks;
      test_info["metric"] = cmd.metric;
      if (cmd.method == "boot") {
        throw ValidationError(
            "--method boot assumes independent features; it cannot be combined "
            "with --blocks");
      }
      const BlockDistanceSet bd = binary ? block_distances(*binary, part, metric)
                                         : block_distances(*numeric, part, metric);
      if (cmd.method == "auto") {
        result = auto_test(bd, plan, norm, policy);
      } else if (cmd.method == "perm") {
        result = permutation_test(bd, plan, norm);
      } else if (cmd.method == "chisq") {
        const VValue v = v_statistic(bd.total(), norm);
        result = chi_square_test(v.v, permutation_moments(bd, norm));
      } else if (cmd.method == "normal") {
        const VValue v = v_statistic(bd.total(), norm);
        result = normal_test(permutation_moments(bd, norm), v.v);
      } else {
        throw ValidationError("unknown --method '" + cmd.method + "'");
      }
    } else {
      if (!binary) {
        throw ValidationError(
            "the independent-features test permutes binary columns; supply "
            "--binarize-threshold, or use --blocks / --distances for general data");
      }
      if (metric != Metric::hamming) {
        test_info["metric"] = cmd.metric;  // coincides with hamming on 0/1 data
      }
      if (cmd.method == "auto") {
        result = auto_test(*binary, plan, policy);
      } else if (cmd.method == "perm") {
        result = permutation_test(*binary, plan);
      } else if (cmd.method == "boot") {
        result = bootstrap_test(*binary, plan);
      } else if (cmd.method == "chisq") {
        const VValue v = v_statistic(hamming_pairwise(*binary), norm);
        result = chi_square_test(v.v, permutation_moments(*binary, norm));
      } else if (cmd.method == "normal") {
        const VValue v = v_statistic(hamming_pairwise(*binary), norm);
        result = normal_test(permutation_moments(*binary, norm), v.v);
      } else {
        throw ValidationError("unknown --method '" + cmd.method + "'");
      }
    }
  }

  report["input"] = input_info;
  report["test"] = test_info;
  report["result"] = result_to_json(result);
  emit(report.dump(2) + "\n", cmd.out);
  return 0;
}

struct TwCmd {
  std::string input;
  std::string format = "delimited";
  std::optional<double> binarize_threshold;
  std::string out;
  bool dump_table = false;
};

int run_tw_command(const TwCmd& cmd, const std::string& command_line) {
  const MatrixFormat format = cmd.format == "dosage" ? MatrixFormat::genotype_dosage
                                                     : MatrixFormat::delimited;
  const NumericMatrix raw = load_matrix(cmd.input, format);
  TwTestResult tw;
  if (cmd.binarize_threshold) {
    tw = tw_test(binarize(raw, *cmd.binarize_threshold));
  } else if (is_binary01(raw)) {
    tw = tw_test(to_binary(raw));
  } else {
    tw = tw_test(raw);
  }
  json report;
  report["tool"] = "vtest";
  report["version"] = kVersion;
  report["command"] = command_line;
  report["input"] = {{"path", cmd.input}, {"n", raw.n_rows}, {"p", raw.n_cols}};
  report["test"] = {{"method", "tw"}};
  json res = result_to_json(tw.result);
  res["lambda_max"] = tw.lambda_max;
  res["normalized"] = tw.normalized;
  res["effective_p"] = tw.effective_p;
  report["result"] = res;
  emit(report.dump(2) + "\n", cmd.out);
  return 0;
}

struct SimCmd {
  std::string null_cfg;
  std::string scenario_cfg;
  std::string out;
  std::string labels_out;
  std::optional<std::uint64_t> seed;
};

int run_simulate_command(const SimCmd& cmd) {
  if (cmd.null_cfg.empty() == cmd.scenario_cfg.empty()) {
    throw ValidationError("exactly one of --null or --scenario is required");
  }
  if (cmd.out.empty()) throw ValidationError("--out is required");
  if (!cmd.null_cfg.empty()) {
    NullModelConfig cfg = parse_null_config(cmd.null_cfg);
    if (cmd.seed) cfg.seed = *cmd.seed;
    Rng rng(cfg.seed);
    const Dataset data = gen_null(cfg, rng);
    if (std::holds_alternative<BinaryMatrix>(data)) {
      write_matrix(cmd.out, std::get<BinaryMatrix>(data));
    } else {
      write_matrix(cmd.out, std::get<NumericMatrix>(data));
    }
  } else {
    ScenarioConfig cfg = parse_scenario_config(cmd.scenario_cfg);
    if (cmd.seed) cfg.seed = *cmd.seed;
    Rng rng(cfg.seed);
    const GeneratedSample sample = gen_stratified(cfg, rng);
    write_matrix(cmd.out, sample.data);
    if (!cmd.labels_out.empty()) {
      std::ofstream out(cmd.labels_out);
      if (!out) throw ValidationError(cmd.labels_out + ": cannot open file for writing");
      for (std::int32_t l : sample.labels) out << l << '\n';
    }
  }
  return 0;
}

struct RateCmd {
  std::string null_kind;
  std::string config;
  std::string scenario;
  std::int64_t n = 50;
  std::int64_t p = 100;
  std::string test = "v";
  double alpha = 0.05;
  std::int64_t reps = 500;
  std::uint64_t seed = 0;
  std::int64_t resamples = env_default_resamples();
  int threads = env_default_threads();
  std::string out;
};

std::string rate_table(const std::string& config_name, const std::string& test,
                       double alpha, const RateEstimate& est) {
  std::ostringstream out;
  out << "config\ttest\talpha\treps\trate\tci_lo\tci_hi\n";
  out << config_name << '\t' << test << '\t' << alpha << '\t' << est.replicates << '\t'
      << est.rate << '\t' << est.ci_lo << '\t' << est.ci_hi << '\n';
  return out.str();
}

int run_fpr_command(const RateCmd& cmd) {
  NullModelConfig cfg;
  if (!cmd.config.empty()) {
    cfg = parse_null_config(cmd.config);
  } else {
    if (cmd.null_kind.empty()) {
      throw ValidationError("--null (kind) or --config is required");
    }
    cfg.kind = null_kind_from_string(cmd.null_kind);
    cfg.n = cmd.n;
    cfg.p = cmd.p;
  }
  TestOptions opts;
  opts.resamples = cmd.resamples;
  const RateEstimate est = estimate_fpr(cfg, test_kind_from_string(cmd.test), cmd.alpha,
                                        cmd.reps, cmd.seed, opts, cmd.threads);
  emit(rate_table(std::string(null_kind_name(cfg.kind)) + ",N=" + std::to_string(cfg.n) +
                      ",P=" + std::to_string(cfg.p),
                  cmd.test, cmd.alpha, est),
       cmd.out);
  return 0;
}

int run_power_command(const RateCmd& cmd) {
  if (cmd.scenario.empty()) throw ValidationError("--scenario is required");
  const ScenarioConfig cfg = parse_scenario_config(cmd.scenario);
  TestOptions opts;
  opts.resamples = cmd.resamples;
  const RateEstimate est = estimate_power(cfg, test_kind_from_string(cmd.test),
                                          cmd.alpha, cmd.reps, cmd.seed, opts,
                                          cmd.threads);
  emit(rate_table(cmd.scenario, cmd.test, cmd.alpha, est), cmd.out);
  return 0;
}

struct RocCmd {
  std::string null_kind;
  std::string null_config;
  std::string alt;
  std::string test = "v";
  std::int64_t reps = 200;
  std::uint64_t seed = 0;
  std::int64_t resamples = env_default_resamples();
  int threads = env_default_threads();
  std::string out;
};

int run_roc_command(const RocCmd& cmd) {
  if (cmd.alt.empty()) throw ValidationError("--alt scenario config is required");
  const ScenarioConfig alt = parse_scenario_config(cmd.alt);
  NullModelConfig null_cfg;
  if (!cmd.null_config.empty()) {
    null_cfg = parse_null_config(cmd.null_config);
  } else {
    if (cmd.null_kind.empty()) {
      throw ValidationError("--null (kind) or --null-config is required");
    }
    null_cfg.kind = null_kind_from_string(cmd.null_kind);
    std::int64_t n_total = 0;
    for (std::int64_t s : alt.sizes) n_total += s;
    null_cfg.n = n_total;  // match the alternative's dimensions
    null_cfg.p = alt.p;
  }
  TestOptions opts;
  opts.resamples = cmd.resamples;
  const RocResult roc = roc_auc(null_cfg, alt, test_kind_from_string(cmd.test),
                                cmd.reps, cmd.seed, opts, cmd.threads);
  std::ostringstream table;
  table << "# auroc\t" << roc.auroc << "\treplicates_per_arm\t" << roc.replicates
        << "\ttest\t" << cmd.test << "\n";
  table << "fpr\ttpr\n";
  for (const auto& [fpr, tpr] : roc.roc_points) {
    table << fpr << '\t' << tpr << '\n';
  }
  emit(table.str(), cmd.out);
  return 0;
}

struct BenchCmd {
  std::string dims = "50x500";
  std::string methods = "perm,chisq,normal";
  std::int64_t resamples = 5000;
  std::int64_t repeats = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int run_bench_command(const BenchCmd& cmd) {
  std::vector<std::pair<std::int64_t, std::int64_t>> dims;
  {
    std::string spec = cmd.dims;
    std::replace(spec.begin(), spec.end(), ',', ' ');
    std::istringstream in(spec);
    std::string token;
    while (in >> token) {
      const auto x = token.find('x');
      if (x == std::string::npos) {
        throw ValidationError("--dims expects entries like 50x500");
      }
      dims.emplace_back(std::stoll(token.substr(0, x)), std::stoll(token.substr(x + 1)));
    }
  }
  if (dims.empty()) throw ValidationError("--dims lists no dimensions");
  if (cmd.repeats < 1) throw ValidationError("--repeats must be >= 1");
  std::vector<std::string> methods;
  {
    std::string spec = cmd.methods;
    std::replace(spec.begin(), spec.end(), ',', ' ');
    std::istringstream in(spec);
    std::string token;
    while (in >> token) methods.push_back(token);
  }

  std::ostringstream table;
  table << "n\tp\tmethod\tR\trepeats\tmean_seconds\n";
  for (const auto& [n, p] : dims) {
    // pre-generate the datasets; timing covers the statistical kernel only
    std::vector<BinaryMatrix> datasets;
    for (std::int64_t rep = 0; rep < cmd.repeats; ++rep) {
      NullModelConfig cfg;
      cfg.kind = NullKind::varying_freq;
      cfg.n = n;
      cfg.p = p;
      Rng rng = Rng::stream(cmd.seed, static_cast<std::uint64_t>(rep));
      datasets.push_back(std::get<BinaryMatrix>(gen_null(cfg, rng)));
    }
    for (const std::string& method : methods) {
      double total_seconds = 0.0;
      for (std::int64_t rep = 0; rep < cmd.repeats; ++rep) {
        const BinaryMatrix& data = datasets[static_cast<std::size_t>(rep)];
        ResamplingPlan plan;
        plan.resamples = cmd.resamples;
        plan.seed = derive_stream_seed(cmd.seed, static_cast<std::uint64_t>(rep));
        plan.threads = 1;
        const auto start = std::chrono::steady_clock::now();
        TestResult result;
        if (method == "perm") {
          result = permutation_test(data, plan);
        } else if (method == "boot") {
          result = bootstrap_test(data, plan);
        } else if (method == "chisq") {
          const double norm = static_cast<double>(data.n_cols);
          const VValue v = v_statistic(hamming_pairwise(data), norm);
          result = chi_square_test(v.v, permutation_moments(data, norm));
        } else if (method == "normal") {
          const double norm = static_cast<double>(data.n_cols);
          const VValue v = v_statistic(hamming_pairwise(data), norm);
          result = normal_test(permutation_moments(data, norm), v.v);
        } else {
          throw ValidationError("unknown bench method '" + method + "'");
        }
        (void)result;
        total_seconds += std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
      }
      table << n << '\t' << p << '\t' << method << '\t' << cmd.resamples << '\t'
            << cmd.repeats << '\t'
            << total_seconds / static_cast<double>(cmd.repeats) << '\n';
    }
  }
  emit(table.str(), cmd.out);
  return 0;
}

int run_f1_table_command(const std::string& out_path) {
  const TracyWidomTable& table = TracyWidomTable::instance();
  std::ostringstream text;
  text.precision(12);
  text << "x\tf1_cdf\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    text << table.grid[i] << '\t' << table.cdf[i] << '\n';
  }
  emit(text.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string command_line = join_command(argc, argv);
  CLI::App app{"Exchangeability and feature-group independence tests"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  TestCmd test_cmd;
  auto* test_sub = app.add_subcommand(
      "test", "Run the pairwise-distance variance test on a dataset");
  test_sub->add_option("--input", test_cmd.input, "matrix file (delimited)");
  test_sub->add_option("--distances", test_cmd.distances,
                       "manifest of per-block distance matrices");
  test_sub->add_option("--format", test_cmd.format, "delimited|dosage")
      ->check(CLI::IsMember({"delimited", "dosage"}));
  test_sub->add_option("--blocks", test_cmd.blocks, "block partition file");
  test_sub->add_option("--metric", test_cmd.metric, "hamming|manhattan|euclidean-sq")
      ->check(CLI::IsMember({"hamming", "manhattan", "euclidean-sq"}));
  test_sub->add_option("--method", test_cmd.method, "auto|perm|chisq|normal|boot")
      ->check(CLI::IsMember({"auto", "perm", "chisq", "normal", "boot"}));
  test_sub->add_option("--R", test_cmd.resamples, "resampling number");
  test_sub->add_option("--seed", test_cmd.seed, "master seed");
  test_sub->add_option("--pvalue", test_cmd.pvalue, "valid|unbiased")
      ->check(CLI::IsMember({"valid", "unbiased"}));
  test_sub->add_option("--binarize-threshold", test_cmd.binarize_threshold,
                       "binarize: 1 iff value > threshold");
  test_sub->add_option("--min-freq", test_cmd.min_freq,
                       "drop binary columns with min frequency below this");
  test_sub->add_option("--norm", test_cmd.norm,
                       "statistic normalization (default: P, or 1 for --distances)");
  test_sub->add_option("--auto-threshold", test_cmd.auto_threshold,
                       "independent units needed before auto picks chi-square");
  test_sub->add_option("--threads", test_cmd.threads, "worker threads (0 = all cores)");
  test_sub->add_option("--out", test_cmd.out, "write the JSON report here");

  TwCmd tw_cmd;
  auto* tw_sub = app.add_subcommand("tw", "Largest-eigenvalue comparison test");
  tw_sub->add_option("--input", tw_cmd.input, "matrix file")->required();
  tw_sub->add_option("--format", tw_cmd.format, "delimited|dosage")
      ->check(CLI::IsMember({"delimited", "dosage"}));
  tw_sub->add_option("--binarize-threshold", tw_cmd.binarize_threshold,
                     "binarize before standardizing");
  tw_sub->add_option("--out", tw_cmd.out, "write the JSON report here");

  SimCmd sim_cmd;
  auto* sim_sub = app.add_subcommand("simulate", "Generate a dataset from a config");
  sim_sub->add_option("--null", sim_cmd.null_cfg, "null model config file");
  sim_sub->add_option("--scenario", sim_cmd.scenario_cfg, "scenario config file");
  sim_sub->add_option("--out", sim_cmd.out, "output matrix file");
  sim_sub->add_option("--labels-out", sim_cmd.labels_out,
                      "write population labels here (scenario only)");
  sim_sub->add_option("--seed", sim_cmd.seed, "override the config seed");

  RateCmd fpr_cmd;
  auto* fpr_sub = app.add_subcommand("fpr", "Estimate the false positive rate");
  fpr_sub->add_option("--null", fpr_cmd.null_kind, "low|varying|high|mixture");
  fpr_sub->add_option("--config", fpr_cmd.config, "null model config file");
  fpr_sub->add_option("--N", fpr_cmd.n, "observations (with --null)");
  fpr_sub->add_option("--P", fpr_cmd.p, "features (with --null)");
  fpr_sub->add_option("--test", fpr_cmd.test, "v|v-perm|v-chisq|v-normal|v-boot|tw");
  fpr_sub->add_option("--alpha", fpr_cmd.alpha, "significance level");
  fpr_sub->add_option("--reps", fpr_cmd.reps, "replicate datasets");
  fpr_sub->add_option("--seed", fpr_cmd.seed, "master seed");
  fpr_sub->add_option("--R", fpr_cmd.resamples, "resampling number per test");
  fpr_sub->add_option("--threads", fpr_cmd.threads, "worker threads");
  fpr_sub->add_option("--out", fpr_cmd.out, "write the rate table here");

  RateCmd power_cmd;
  auto* power_sub = app.add_subcommand("power", "Estimate power under a scenario");
  power_sub->add_option("--scenario", power_cmd.scenario, "scenario config file");
  power_sub->add_option("--test", power_cmd.test, "test spec");
  power_sub->add_option("--alpha", power_cmd.alpha, "significance level");
  power_sub->add_option("--reps", power_cmd.reps, "replicate datasets");
  power_sub->add_option("--seed", power_cmd.seed, "master seed");
  power_sub->add_option("--R", power_cmd.resamples, "resampling number per test");
  power_sub->add_option("--threads", power_cmd.threads, "worker threads");
  power_sub->add_option("--out", power_cmd.out, "write the rate table here");

  RocCmd roc_cmd;
  auto* roc_sub = app.add_subcommand("roc", "ROC/AUROC for a null-alternative pairing");
  roc_sub->add_option("--null", roc_cmd.null_kind, "null kind (dims taken from --alt)");
  roc_sub->add_option("--null-config", roc_cmd.null_config, "null model config file");
  roc_sub->add_option("--alt", roc_cmd.alt, "scenario config file");
  roc_sub->add_option("--test", roc_cmd.test, "test spec");
  roc_sub->add_option("--reps", roc_cmd.reps, "replicates per arm");
  roc_sub->add_option("--seed", roc_cmd.seed, "master seed");
  roc_sub->add_option("--R", roc_cmd.resamples, "resampling number per test");
  roc_sub->add_option("--threads", roc_cmd.threads, "worker threads");
  roc_sub->add_option("--out", roc_cmd.out, "write the ROC table here");

  BenchCmd bench_cmd;
  auto* bench_sub = app.add_subcommand("bench", "Time the p-value methods");
  bench_sub->add_option("--dims", bench_cmd.dims, "comma list of NxP, e.g. 50x500,500x50");
  bench_sub->add_option("--methods", bench_cmd.methods, "comma list: perm,chisq,boot,normal");
  bench_sub->add_option("--R", bench_cmd.resamples, "resampling number");
  bench_sub->add_option("--repeats", bench_cmd.repeats, "datasets per cell");
  bench_sub->add_option("--seed", bench_cmd.seed, "master seed");
  bench_sub->add_option("--out", bench_cmd.out, "write the timing table here");

  std::string f1_out;
  auto* f1_sub = app.add_subcommand("f1-table", "Dump the Tracy-Widom CDF table");
  f1_sub->add_option("--out", f1_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*test_sub) return run_test_command(test_cmd, command_line);
    if (*tw_sub) return run_tw_command(tw_cmd, command_line);
    if (*sim_sub) return run_simulate_command(sim_cmd);
    if (*fpr_sub) return run_fpr_command(fpr_cmd);
    if (*power_sub) return run_power_command(power_cmd);
    if (*roc_sub) return run_roc_command(roc_cmd);
    if (*bench_sub) return run_bench_command(bench_cmd);
    if (*f1_sub) return run_f1_table_command(f1_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
