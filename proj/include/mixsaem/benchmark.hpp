#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixsaem/metrics.hpp"
#include "mixsaem/missingness.hpp"
#include "mixsaem/saem.hpp"
#include "mixsaem/simulation.hpp"

namespace mixsaem {

enum class Method { Saem, SaemSmoothed, MeanMode, CompleteCase, Full };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct BenchmarkConfig {
  int runs = 20;
  std::uint64_t seed = 20251018;
  SyntheticDesign design = SyntheticDesign::reference();
  Mechanism mechanism = Mechanism::MCAR;
  double rate = 0.3;
  double test_fraction = 0.2;
  std::vector<Method> methods{Method::Saem, Method::MeanMode, Method::CompleteCase, Method::Full};
  SaemConfig saem;
  double baseline_ridge = 0.0;
  unsigned threads = 1;

  BenchmarkConfig() { saem.trajectory_loglik_samples = 0; saem.keep_param_history = false; }
};

/// One method on one replication. `beta` is empty when fitting failed; the
/// classification metrics are absent when fitting or scoring failed.
struct MethodRun {
  Method method = Method::Saem;
  std::vector<double> beta;
  std::optional<ClassificationMetrics> metrics;
  std::vector<double> probabilities;  // on the test split
  std::string error;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct ReplicationResult {
  int run = 0;
  double train_missing_fraction = 0.0;
  std::vector<int> test_labels;
  std::vector<MethodRun> methods;
  std::map<std::string, double> stage_seconds;
};

struct BenchmarkReport {
  BenchmarkConfig config;
  std::vector<ReplicationResult> runs;

  /// Successful beta estimates of one method.
  std::vector<std::vector<double>> estimates(Method m) const;
  /// Per-run values of a classification metric ("auc", "accuracy", ...).
  std::vector<double> metric_values(Method m, const std::string& metric) const;
};

/// simulate -> split -> inject (train and test separately) -> fit every
/// method -> predict the test split -> metrics, for each replication.
/// Replication r draws all of its randomness from derive_seed(seed, {r, stage}),
/// so results do not depend on `threads`.
ReplicationResult run_replication(const BenchmarkConfig& cfg, int run);
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg);

/// Table row order: AUC, Accuracy, Precision, Sensitivity, Specificity,
/// F1 score, Brier score.
const std::vector<std::string>& metric_names();

std::string runs_long_csv(const BenchmarkReport& report);
std::string bias_rmse_csv(const BenchmarkReport& report);
std::string bias_rmse_table(const BenchmarkReport& report);
std::string metrics_summary_csv(const BenchmarkReport& report);
std::string metrics_summary_table(const BenchmarkReport& report);
std::string timings_csv(const BenchmarkReport& report);
std::string roc_csv(const BenchmarkReport& report);

/// Writes every report file plus the config snapshot into `dir`.
void write_benchmark_report(const BenchmarkReport& report, const std::string& dir,
                            const std::string& config_snapshot);

}  // namespace mixsaem
