#pragma once

// Experiment runner: builds fresh learners and a fresh seeded stream per
// trial, runs the strict predict-then-learn loop, averages per-step squared
// errors across trials and emits CSV metrics and a JSON summary.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "treereg/datagen.hpp"
#include "treereg/json_io.hpp"
#include "treereg/regressor.hpp"

namespace treereg {

inline constexpr int kConfigVersion = 1;

struct LearnerSpec {
  std::string name;
  Json params;  // includes "kind"
};

struct ExperimentConfig {
  int version = kConfigVersion;
  StreamSpec stream;
  std::vector<LearnerSpec> learners;
  int trials = 1;
  /// Prefix for <output>_metrics.csv and <output>_summary.json; empty: none.
  std::string output;
  std::size_t stride = 1;
  bool parallel = false;
  /// Report errors of normalized streams and of learners with
  /// "normalize": true in the target's original units.
  bool scale_back = true;
};

/// Throws ConfigError on a missing key, a wrong version or a bad value.
ExperimentConfig experiment_config_from_json(const Json& j);
Json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

/// TREEREG_SEED, when set to an unsigned integer, replaces `fallback`.
std::uint64_t seed_from_environment(std::uint64_t fallback);

struct TrialMetrics {
  std::vector<double> e2;
  double regressor_evaluations = 0.0;  // summed over steps
  double kappa_accumulations = 0.0;
  bool failed = false;
  std::string failure;
  Json final_snapshot;
};

/// Runs one pass over `samples`. Each learner sees x_t, commits y_t, and only
/// then receives d_t. A learner whose error turns non-finite is dropped from
/// the rest of the pass and marked failed. Errors are multiplied by
/// `error_scale` before squaring.
std::vector<TrialMetrics> run_trial(const std::vector<Sample>& samples,
                                    std::vector<std::unique_ptr<SequentialRegressor>>& learners,
                                    double error_scale = 1.0);

struct LearnerMetrics {
  std::string name;
  std::string kind;
  std::vector<double> e2;  // trial mean per step
  std::vector<double> cum_e2;
  std::vector<double> norm_err;  // cum_e2[t] / (t + 1)
  double mean_regressor_evaluations = 0.0;  // per step
  double mean_kappa_accumulations = 0.0;
  int failed_trials = 0;
  std::vector<std::string> failures;
  std::vector<Json> final_snapshots;  // one per trial, null for failed ones

  double final_norm_err() const { return norm_err.empty() ? NAN : norm_err.back(); }
};

struct ExperimentResult {
  std::size_t n = 0;
  int trials = 0;
  std::vector<LearnerMetrics> learners;

  const LearnerMetrics& at(const std::string& name) const;
};

/// Averages per-trial metrics pointwise over the trials that did not fail.
LearnerMetrics aggregate(const std::string& name, const std::string& kind, const std::vector<TrialMetrics>& trials);

/// Trial k uses stream seed cfg.stream.seed + k.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Columns t, learner, e2, cum_e2, norm_err; t is 1-based, every stride-th
/// step plus the last one.
void write_metrics_csv(std::ostream& out, const ExperimentResult& result, std::size_t stride);

/// Final metrics, counters and failures per learner, plus the config echo.
Json summary_json(const ExperimentConfig& cfg, const ExperimentResult& result);

}  // namespace treereg
