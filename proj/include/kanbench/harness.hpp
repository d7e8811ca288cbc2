#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kanbench/dataset.hpp"
#include "kanbench/metrics.hpp"
#include "kanbench/stats.hpp"

namespace kanbench {

struct KanHyperparams {
  std::vector<int> hidden_widths{4};
  int order = 3;
  int grid = 5;
  double learning_rate = 1e-3;
};

struct ExperimentConfig {
  std::string manifest_path = "data/manifest.json";
  std::vector<std::string> datasets;  // empty = every manifest entry
  std::vector<std::string> strategies = {"baseline", "resampled", "focal"};
  std::vector<std::string> architectures = {"kan", "mlp"};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double test_fraction = 0.2;
  std::string out_dir;  // empty = no persistence
  int jobs = 1;
  bool sequential_timing = true;

  int max_epochs = 300;
  bool early_stopping = true;
  int patience = 30;
  double val_fraction = 0.1;
  int batch_size = 0;  // 0 = 32 when the training set is < 500 rows, else 64
  // The benchmark table's learning rates are KAN-tuned; the comparator MLP
  // trains with Adam's customary default unless overridden.
  double mlp_learning_rate = 1e-3;

  double focal_gamma = 2.0;
  // Empty = inverse class frequency on the training split.
  std::optional<std::pair<double, double>> focal_alpha;

  int smote_k_neighbors = 5;
  double smote_target_ratio = 1.0;
  bool train_logs = false;

  std::map<std::string, KanHyperparams> hyperparameters;  // per-dataset overrides
};

// Strict parse: unknown keys raise ConfigError.
ExperimentConfig load_config(const std::string& path);

// Benchmark defaults for the ten bundled datasets; falls back to a generic
// configuration for unknown names.
KanHyperparams hyperparams_for(const ExperimentConfig& config,
                               const std::string& dataset);

struct ExperimentResult {
  std::string dataset;
  std::string architecture;
  std::string strategy;
  std::uint64_t seed = 0;
  MetricBundle metrics;
  double wall_time_s = 0.0;
  std::size_t model_memory_bytes = 0;
  std::size_t n_synthetic = 0;
  std::size_t n_removed_tomek = 0;
  std::string status = "ok";  // ok | failed | error
  // Provenance kept out of the CSV so identical configs reproduce it.
  std::string message;
  std::string timestamp;  // completion time, ISO 8601 UTC
  KanHyperparams hyper;
  int epochs_run = 0;
};

// The (dataset, seed) split every cell of the grid uses. Architectures and
// strategies share it, which keeps test partitions byte-identical across
// the three strategy arms.
Split experiment_split(const BinaryDataset& data,
                       const std::string& dataset_name, std::uint64_t seed,
                       double test_fraction);

// Runs the dataset x architecture x strategy x seed grid. Rows are appended
// to <out_dir>/results.csv as cells finish when out_dir is set.
std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config,
                                             std::ostream* progress = nullptr);

struct ArmSummary {
  std::string architecture;
  std::string strategy;
  int n_datasets = 0;
  std::map<std::string, double> metric_mean;
  std::map<std::string, double> metric_sd;
  double median_wall_time_s = 0.0;
  double median_memory_bytes = 0.0;
};

// Seed-median per dataset first, then mean/sd across datasets; resources
// are medians of the per-dataset medians.
std::vector<ArmSummary> aggregate(const std::vector<ExperimentResult>& results);

struct ComparisonRow {
  std::string comparison;
  std::string metric;
  bool computable = false;
  bool degenerate = false;
  double p = 1.0;
  double d = 0.0;
  int n = 0;
  std::string outcome;
};

// The five paired comparisons of the benchmark, over per-dataset
// seed-medians.
std::vector<ComparisonRow> statistical_report(
    const std::vector<ExperimentResult>& results);

extern const char* const kResultsCsvHeader;
void write_results_csv(const std::vector<ExperimentResult>& results,
                       const std::string& path);
std::vector<ExperimentResult> read_results_csv(const std::string& path);
std::string result_csv_row(const ExperimentResult& r);

// results.csv + summary.json + tables.txt under out_dir.
void emit_reports(const ExperimentConfig& config,
                  const std::vector<ExperimentResult>& results,
                  const std::string& out_dir);

struct DatasetCheck {
  std::string name;
  bool ok = false;
  std::string detail;
  std::size_t instances = 0;
  std::size_t features = 0;
  double imbalance_ratio = 0.0;
};

// Parses every manifest entry and compares against its expectations
// (instances, features, IR within 0.1, sha256 when present).
std::vector<DatasetCheck> validate_manifest(const std::string& manifest_path);

double metric_by_name(const MetricBundle& m, const std::string& name);
const std::vector<std::string>& metric_names();

}  // namespace kanbench
