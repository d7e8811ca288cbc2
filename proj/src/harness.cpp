#include "kanbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "kanbench/errors.hpp"
#include "kanbench/models.hpp"
#include "kanbench/resample.hpp"
#include "kanbench/rng.hpp"
#include "kanbench/train.hpp"
#include "kanbench/version.hpp"

namespace kanbench {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double_field(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad numeric field '" + s + "'");
  }
  return v;
}

const std::map<std::string, KanHyperparams>& benchmark_defaults() {
  static const std::map<std::string, KanHyperparams> table = {
      {"yeast4", {{7}, 3, 5, 0.00066}},
      {"yeast5", {{7, 8}, 2, 5, 0.00040}},
      {"yeast6", {{4}, 2, 5, 0.00452}},
      {"glass2", {{4}, 3, 5, 0.00236}},
      {"ecoli3", {{6, 5}, 2, 5, 0.00069}},
      {"winequality-red-8_vs_6-7", {{7}, 3, 5, 0.00062}},
      {"new-thyroid1", {{6, 4}, 3, 3, 0.00785}},
      {"glass4", {{6}, 3, 4, 0.00010}},
      {"glass6", {{8}, 2, 5, 0.00028}},
      {"winequality-red-8_vs_6", {{5}, 3, 5, 0.00138}},
  };
  return table;
}

KanHyperparams parse_hyperparams(const json& body, const std::string& name) {
  KanHyperparams hp;
  for (const auto& [key, value] : body.items()) {
    if (key == "widths") {
      hp.hidden_widths = value.get<std::vector<int>>();
    } else if (key == "k") {
      hp.order = value.get<int>();
    } else if (key == "grid") {
      hp.grid = value.get<int>();
    } else if (key == "learning_rate") {
      hp.learning_rate = value.get<double>();
    } else {
      throw ConfigError("hyperparameters for '" + name + "': unknown key '" +
                        key + "'");
    }
  }
  return hp;
}

std::uint64_t cell_seed(const std::string& dataset, std::uint64_t seed,
                        const std::string& tag) {
  return mix_seed(mix_seed(hash_str(dataset), seed), hash_str(tag));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct CellSpec {
  std::string dataset;
  std::string architecture;
  std::string strategy;
  std::uint64_t seed = 0;
};

struct PreparedDataset {
  bool ok = false;
  std::string error;
  BinaryDataset binary;
};

LossSpec loss_for(const ExperimentConfig& cfg, const std::string& strategy,
                  const std::vector<int>& train_labels) {
  LossSpec spec;
  if (strategy != "focal") {
    spec.kind = LossKind::kCrossEntropy;
    return spec;
  }
  spec.kind = LossKind::kFocal;
  spec.focal.gamma = cfg.focal_gamma;
  if (cfg.focal_alpha) {
    spec.focal.alpha0 = cfg.focal_alpha->first;
    spec.focal.alpha1 = cfg.focal_alpha->second;
  } else {
    // Inverse class frequency on the training split.
    const double n = static_cast<double>(train_labels.size());
    double minority = 0.0;
    for (int y : train_labels) minority += y;
    spec.focal.alpha1 = (n - minority) / n;
    spec.focal.alpha0 = minority / n;
  }
  return spec;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ExperimentResult run_cell(const CellSpec& cell, const BinaryDataset& bin,
                          const ExperimentConfig& cfg, const KanHyperparams& hp,
                          std::ostream* train_log) {
  ExperimentResult res;
  res.dataset = cell.dataset;
  res.architecture = cell.architecture;
  res.strategy = cell.strategy;
  res.seed = cell.seed;
  res.hyper = hp;

  try {
    const Split split =
        experiment_split(bin, cell.dataset, cell.seed, cfg.test_fraction);
    const Scaler scaler = fit_scaler(bin.features, split.train_indices);
    Matrix train_x = transform(scaler, gather_rows(bin.features, split.train_indices));
    std::vector<int> train_y = gather(bin.labels, split.train_indices);
    const Matrix test_x = transform(scaler, gather_rows(bin.features, split.test_indices));
    const std::vector<int> test_y = gather(bin.labels, split.test_indices);

    if (cell.strategy == "resampled") {
      ResamplePlan plan;
      plan.k_neighbors = cfg.smote_k_neighbors;
      plan.target_ratio = cfg.smote_target_ratio;
      plan.seed = cell_seed(cell.dataset, cell.seed, "smote");
      ResampleOutcome out = smote_tomek(train_x, train_y, plan);
      res.n_synthetic = out.n_synthetic;
      res.n_removed_tomek = out.n_removed_by_tomek;
      train_x = std::move(out.features);
      train_y = std::move(out.labels);
    }

    TrainConfig tc;
    tc.learning_rate =
        cell.architecture == "mlp" ? cfg.mlp_learning_rate : hp.learning_rate;
    tc.max_epochs = cfg.max_epochs;
    tc.batch_size = cfg.batch_size > 0
                        ? cfg.batch_size
                        : (train_x.rows() < 500 ? 32 : 64);
    tc.loss = loss_for(cfg, cell.strategy, train_y);
    tc.seed = cell_seed(cell.dataset, cell.seed, cell.strategy + "-train");
    if (cfg.early_stopping) {
      tc.early_stop = EarlyStopConfig{cfg.patience, cfg.val_fraction};
    }
    tc.epoch_log = train_log;

    std::vector<int> widths;
    widths.push_back(static_cast<int>(train_x.cols()));
    widths.insert(widths.end(), hp.hidden_widths.begin(), hp.hidden_widths.end());
    widths.push_back(2);

    Matrix logits;
    TrainReport report;
    if (cell.architecture == "kan") {
      KanModel model = init_kan(widths, hp.order, hp.grid, 0.0, 1.0,
                                cell_seed(cell.dataset, cell.seed, "init-kan"));
      report = train_kan(model, train_x, train_y, tc);
      logits = kan_forward(model, test_x);
    } else if (cell.architecture == "mlp") {
      MlpModel model =
          init_mlp(widths, cell_seed(cell.dataset, cell.seed, "init-mlp"));
      report = train_mlp(model, train_x, train_y, tc);
      logits = mlp_forward(model, test_x);
    } else {
      throw ConfigError("unknown architecture '" + cell.architecture + "'");
    }

    std::vector<int> pred(test_y.size());
    std::vector<double> score(test_y.size());
    for (std::size_t r = 0; r < test_y.size(); ++r) {
      score[r] = logits(r, 1) - logits(r, 0);
      pred[r] = score[r] > 0.0 ? 1 : 0;
    }
    res.metrics = bundle_from_counts(confusion(test_y, pred));
    res.metrics.auc = roc_auc(test_y, score);
    res.wall_time_s = report.wall_time_seconds;
    res.model_memory_bytes = report.model_memory_bytes;
    res.epochs_run = report.epochs_run;
    res.status = "ok";
  } catch (const NumericDivergence& e) {
    res.status = "failed";
    res.message = e.what();
  } catch (const Error& e) {
    res.status = "failed";
    res.message = e.what();
  }
  res.timestamp = utc_timestamp();
  return res;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["manifest"] = c.manifest_path;
  j["datasets"] = c.datasets;
  j["strategies"] = c.strategies;
  j["architectures"] = c.architectures;
  j["seeds"] = c.seeds;
  j["test_fraction"] = c.test_fraction;
  j["out_dir"] = c.out_dir;
  j["jobs"] = c.jobs;
  j["sequential_timing"] = c.sequential_timing;
  j["max_epochs"] = c.max_epochs;
  j["early_stopping"] = c.early_stopping;
  j["patience"] = c.patience;
  j["val_fraction"] = c.val_fraction;
  j["batch_size"] = c.batch_size;
  j["mlp_learning_rate"] = c.mlp_learning_rate;
  j["focal_gamma"] = c.focal_gamma;
  if (c.focal_alpha) {
    j["focal_alpha"] = {c.focal_alpha->first, c.focal_alpha->second};
  } else {
    j["focal_alpha"] = "inverse-frequency";
  }
  j["smote_k_neighbors"] = c.smote_k_neighbors;
  j["smote_target_ratio"] = c.smote_target_ratio;
  j["train_logs"] = c.train_logs;
  json hp = json::object();
  for (const auto& [name, h] : c.hyperparameters) {
    hp[name] = {{"widths", h.hidden_widths},
                {"k", h.order},
                {"grid", h.grid},
                {"learning_rate", h.learning_rate}};
  }
  j["hyperparameters"] = hp;
  return j;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "manifest") {
        c.manifest_path = value.get<std::string>();
      } else if (key == "datasets") {
        c.datasets = value.get<std::vector<std::string>>();
      } else if (key == "strategies") {
        c.strategies = value.get<std::vector<std::string>>();
      } else if (key == "architectures") {
        c.architectures = value.get<std::vector<std::string>>();
      } else if (key == "seeds") {
        c.seeds = value.get<std::vector<std::uint64_t>>();
      } else if (key == "test_fraction") {
        c.test_fraction = value.get<double>();
      } else if (key == "out_dir") {
        c.out_dir = value.get<std::string>();
      } else if (key == "jobs") {
        c.jobs = value.get<int>();
      } else if (key == "sequential_timing") {
        c.sequential_timing = value.get<bool>();
      } else if (key == "max_epochs") {
        c.max_epochs = value.get<int>();
      } else if (key == "early_stopping") {
        c.early_stopping = value.get<bool>();
      } else if (key == "patience") {
        c.patience = value.get<int>();
      } else if (key == "val_fraction") {
        c.val_fraction = value.get<double>();
      } else if (key == "batch_size") {
        c.batch_size = value.get<int>();
      } else if (key == "mlp_learning_rate") {
        c.mlp_learning_rate = value.get<double>();
      } else if (key == "focal_gamma") {
        c.focal_gamma = value.get<double>();
      } else if (key == "focal_alpha") {
        if (value.is_string()) {
          if (value.get<std::string>() != "inverse-frequency") {
            throw ConfigError("focal_alpha string must be 'inverse-frequency'");
          }
          c.focal_alpha.reset();
        } else {
          const auto pair = value.get<std::vector<double>>();
          if (pair.size() != 2) throw ConfigError("focal_alpha needs 2 values");
          c.focal_alpha = std::make_pair(pair[0], pair[1]);
        }
      } else if (key == "smote_k_neighbors") {
        c.smote_k_neighbors = value.get<int>();
      } else if (key == "smote_target_ratio") {
        c.smote_target_ratio = value.get<double>();
      } else if (key == "train_logs") {
        c.train_logs = value.get<bool>();
      } else if (key == "hyperparameters") {
        for (const auto& [name, body] : value.items()) {
          c.hyperparameters[name] = parse_hyperparams(body, name);
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  for (const std::string& s : c.strategies) {
    if (s != "baseline" && s != "resampled" && s != "focal") {
      throw ConfigError("unknown strategy '" + s + "'");
    }
  }
  for (const std::string& a : c.architectures) {
    if (a != "kan" && a != "mlp") throw ConfigError("unknown architecture '" + a + "'");
  }
  if (c.strategies.empty() || c.architectures.empty() || c.seeds.empty()) {
    throw ConfigError("strategies, architectures and seeds must be nonempty");
  }
  return c;
}

Split experiment_split(const BinaryDataset& data,
                       const std::string& dataset_name, std::uint64_t seed,
                       double test_fraction) {
  return stratified_split(data, test_fraction,
                          cell_seed(dataset_name, seed, "split"));
}

KanHyperparams hyperparams_for(const ExperimentConfig& config,
                               const std::string& dataset) {
  if (const auto it = config.hyperparameters.find(dataset);
      it != config.hyperparameters.end()) {
    return it->second;
  }
  if (const auto it = benchmark_defaults().find(dataset);
      it != benchmark_defaults().end()) {
    return it->second;
  }
  return {};
}

std::vector<ExperimentResult> run_experiment(const ExperimentConfig& config,
                                             std::ostream* progress) {
  const std::vector<ManifestEntry> manifest = load_manifest(config.manifest_path);
  std::vector<std::string> names = config.datasets;
  if (names.empty()) {
    for (const ManifestEntry& e : manifest) names.push_back(e.name);
  }
  std::map<std::string, const ManifestEntry*> by_name;
  for (const ManifestEntry& e : manifest) by_name[e.name] = &e;
  for (const std::string& n : names) {
    if (!by_name.count(n)) {
      throw ConfigError("dataset '" + n + "' is not in the manifest");
    }
  }

  // Output directory and the incremental CSV must work before training.
  std::ofstream csv;
  if (!config.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (config.train_logs) {
      std::filesystem::create_directories(
          std::filesystem::path(config.out_dir) / "logs", ec);
    }
    const auto path = std::filesystem::path(config.out_dir) / "results.csv";
    csv.open(path, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("output directory not writable: " + config.out_dir);
    csv << kResultsCsvHeader << "\n" << std::flush;
  }

  // Parse every dataset up front; a missing or malformed file aborts that
  // dataset with one recorded error row, and the grid continues.
  std::map<std::string, PreparedDataset> prepared;
  for (const std::string& n : names) {
    PreparedDataset p;
    try {
      p.binary = binarize_ova(load_keel_file(by_name[n]->path));
      p.ok = true;
    } catch (const Error& e) {
      p.error = e.what();
    }
    prepared[n] = std::move(p);
  }

  std::vector<ExperimentResult> results;
  std::vector<CellSpec> cells;
  for (const std::string& n : names) {
    if (!prepared[n].ok) {
      ExperimentResult err;
      err.dataset = n;
      err.architecture = "-";
      err.strategy = "-";
      err.status = "error";
      err.message = prepared[n].error;
      results.push_back(err);
      continue;
    }
    for (const std::string& arch : config.architectures) {
      for (const std::string& strat : config.strategies) {
        for (std::uint64_t seed : config.seeds) {
          cells.push_back({n, arch, strat, seed});
        }
      }
    }
  }
  for (const ExperimentResult& err : results) {
    if (csv.is_open()) csv << result_csv_row(err) << "\n" << std::flush;
    if (progress) {
      (*progress) << err.dataset << ": error: " << err.message << "\n";
    }
  }

  const std::size_t first_cell_row = results.size();
  results.resize(first_cell_row + cells.size());

  const int jobs = config.sequential_timing ? 1 : std::max(1, config.jobs);
  std::atomic<std::size_t> next{0};
  std::mutex flush_mutex;
  std::vector<char> done(cells.size(), 0);
  std::size_t flushed = 0;

  auto flush_ready = [&] {
    while (flushed < cells.size() && done[flushed]) {
      const ExperimentResult& r = results[first_cell_row + flushed];
      if (csv.is_open()) csv << result_csv_row(r) << "\n" << std::flush;
      if (progress) {
        (*progress) << "[" << (flushed + 1) << "/" << cells.size() << "] "
                    << r.dataset << " " << r.architecture << " " << r.strategy
                    << " seed=" << r.seed << " status=" << r.status;
        if (r.status == "ok") {
          (*progress) << " balacc=" << r.metrics.balanced_accuracy
                      << " gmean=" << r.metrics.g_mean << " t="
                      << r.wall_time_s << "s epochs=" << r.epochs_run;
        }
        (*progress) << "\n" << std::flush;
      }
      ++flushed;
    }
  };

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const CellSpec& cell = cells[i];
      const KanHyperparams hp = hyperparams_for(config, cell.dataset);

      std::ofstream tlog;
      if (config.train_logs && !config.out_dir.empty()) {
        const auto path = std::filesystem::path(config.out_dir) / "logs" /
                          (cell.dataset + "_" + cell.architecture + "_" +
                           cell.strategy + "_" + std::to_string(cell.seed) +
                           ".csv");
        tlog.open(path, std::ios::trunc);
        if (tlog) tlog << "epoch,loss,val_balanced_accuracy\n";
      }

      ExperimentResult r =
          run_cell(cell, prepared[cell.dataset].binary, config, hp,
                   tlog.is_open() ? &tlog : nullptr);
      {
        std::lock_guard<std::mutex> lock(flush_mutex);
        results[first_cell_row + i] = std::move(r);
        done[i] = 1;
        flush_ready();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "precision",         "recall", "specificity", "f1",
      "balanced_accuracy", "g_mean", "auc"};
  return names;
}

double metric_by_name(const MetricBundle& m, const std::string& name) {
  if (name == "precision") return m.precision;
  if (name == "recall") return m.recall;
  if (name == "specificity") return m.specificity;
  if (name == "f1") return m.f1;
  if (name == "balanced_accuracy") return m.balanced_accuracy;
  if (name == "g_mean") return m.g_mean;
  if (name == "auc") return m.auc;
  throw ConfigError("unknown metric '" + name + "'");
}

namespace {

// dataset -> seed values for one (architecture, strategy) arm.
using ArmTable = std::map<std::string, std::vector<const ExperimentResult*>>;

std::map<std::pair<std::string, std::string>, ArmTable> group_ok_results(
    const std::vector<ExperimentResult>& results) {
  std::map<std::pair<std::string, std::string>, ArmTable> arms;
  for (const ExperimentResult& r : results) {
    if (r.status != "ok") continue;
    arms[{r.architecture, r.strategy}][r.dataset].push_back(&r);
  }
  return arms;
}

std::map<std::string, double> dataset_medians(const ArmTable& table,
                                              const std::string& metric) {
  std::map<std::string, double> out;
  for (const auto& [dataset, rows] : table) {
    std::vector<double> vals;
    for (const ExperimentResult* r : rows) {
      vals.push_back(metric == "wall_time_s"
                         ? r->wall_time_s
                         : (metric == "model_memory_bytes"
                                ? static_cast<double>(r->model_memory_bytes)
                                : metric_by_name(r->metrics, metric)));
    }
    out[dataset] = median_of(std::move(vals));
  }
  return out;
}

}  // namespace

std::vector<ArmSummary> aggregate(const std::vector<ExperimentResult>& results) {
  const auto arms = group_ok_results(results);
  std::vector<ArmSummary> out;
  for (const auto& [key, table] : arms) {
    ArmSummary s;
    s.architecture = key.first;
    s.strategy = key.second;
    s.n_datasets = static_cast<int>(table.size());
    for (const std::string& metric : metric_names()) {
      const auto med = dataset_medians(table, metric);
      double mean = 0.0;
      for (const auto& [_, v] : med) mean += v;
      mean /= static_cast<double>(med.size());
      double ss = 0.0;
      for (const auto& [_, v] : med) ss += (v - mean) * (v - mean);
      const double sd =
          med.size() > 1 ? std::sqrt(ss / static_cast<double>(med.size() - 1)) : 0.0;
      s.metric_mean[metric] = mean;
      s.metric_sd[metric] = sd;
    }
    std::vector<double> times, mems;
    for (const auto& [_, v] : dataset_medians(table, "wall_time_s")) times.push_back(v);
    for (const auto& [_, v] : dataset_medians(table, "model_memory_bytes")) mems.push_back(v);
    s.median_wall_time_s = median_of(std::move(times));
    s.median_memory_bytes = median_of(std::move(mems));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct ComparisonSpec {
  std::string label;
  std::string metric;
  std::pair<std::string, std::string> arm_a;  // architecture, strategy
  std::pair<std::string, std::string> arm_b;
  bool over_all_strategies = false;  // time comparison pools every strategy
};

ComparisonRow run_comparison(const ComparisonSpec& spec,
                             const std::vector<ExperimentResult>& results) {
  ComparisonRow row;
  row.comparison = spec.label;
  row.metric = spec.metric;

  // Per-dataset seed medians for each side, paired by dataset.
  std::map<std::string, std::vector<double>> vals_a, vals_b;
  for (const ExperimentResult& r : results) {
    if (r.status != "ok") continue;
    const bool strategies_match_a =
        spec.over_all_strategies || r.strategy == spec.arm_a.second;
    const bool strategies_match_b =
        spec.over_all_strategies || r.strategy == spec.arm_b.second;
    const double v = spec.metric == "time" ? r.wall_time_s
                                           : metric_by_name(r.metrics, spec.metric);
    if (r.architecture == spec.arm_a.first && strategies_match_a) {
      vals_a[r.dataset].push_back(v);
    }
    if (r.architecture == spec.arm_b.first && strategies_match_b) {
      vals_b[r.dataset].push_back(v);
    }
  }

  PairedSample sample;
  for (const auto& [dataset, va] : vals_a) {
    const auto it = vals_b.find(dataset);
    if (it == vals_b.end()) continue;
    sample.condition_a.push_back(median_of(va));
    sample.condition_b.push_back(median_of(it->second));
  }
  row.n = static_cast<int>(sample.condition_a.size());
  if (row.n < 2) {
    row.outcome = "not computable";
    return row;
  }
  row.computable = true;
  try {
    const WilcoxonResult w = wilcoxon_signed_rank(sample);
    row.p = w.p;
    row.d = cohens_d_paired(sample);
  } catch (const DegenerateTest&) {
    row.degenerate = true;
    row.outcome = "no difference";
    return row;
  }
  if (std::fabs(row.d) < 0.2) {
    row.outcome = "no difference (|d| < 0.2)";
  } else if (row.p < 0.05) {
    row.outcome = row.d > 0 ? "significant (a > b)" : "significant (a < b)";
  } else if (row.p < 0.1) {
    row.outcome = "marginal";
  } else {
    row.outcome = "non-significant";
  }
  return row;
}

}  // namespace

std::vector<ComparisonRow> statistical_report(
    const std::vector<ExperimentResult>& results) {
  const std::vector<ComparisonSpec> specs = {
      {"KAN: baseline vs focal", "g_mean", {"kan", "baseline"}, {"kan", "focal"}, false},
      {"KAN: baseline vs resampled", "g_mean", {"kan", "baseline"}, {"kan", "resampled"}, false},
      {"Baseline: KAN vs MLP", "f1", {"kan", "baseline"}, {"mlp", "baseline"}, false},
      {"Resampled: KAN vs MLP", "balanced_accuracy", {"kan", "resampled"}, {"mlp", "resampled"}, false},
      {"KAN vs MLP", "time", {"kan", ""}, {"mlp", ""}, true},
  };
  std::vector<ComparisonRow> rows;
  for (const ComparisonSpec& spec : specs) {
    rows.push_back(run_comparison(spec, results));
  }
  return rows;
}

const char* const kResultsCsvHeader =
    "dataset,architecture,strategy,seed,precision,recall,specificity,f1,"
    "balanced_accuracy,g_mean,auc,wall_time_s,model_memory_bytes,n_synthetic,"
    "n_removed_tomek,status";

std::string result_csv_row(const ExperimentResult& r) {
  std::ostringstream out;
  out << r.dataset << ',' << r.architecture << ',' << r.strategy << ','
      << r.seed << ',' << fmt_double(r.metrics.precision) << ','
      << fmt_double(r.metrics.recall) << ',' << fmt_double(r.metrics.specificity)
      << ',' << fmt_double(r.metrics.f1) << ','
      << fmt_double(r.metrics.balanced_accuracy) << ','
      << fmt_double(r.metrics.g_mean) << ',' << fmt_double(r.metrics.auc) << ','
      << fmt_double(r.wall_time_s) << ',' << r.model_memory_bytes << ','
      << r.n_synthetic << ',' << r.n_removed_tomek << ',' << r.status;
  return out.str();
}

void write_results_csv(const std::vector<ExperimentResult>& results,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << kResultsCsvHeader << "\n";
  for (const ExperimentResult& r : results) out << result_csv_row(r) << "\n";
}

std::vector<ExperimentResult> read_results_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line != kResultsCsvHeader) {
    throw ParseError("results csv: unexpected header");
  }
  std::vector<ExperimentResult> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        f.push_back(line.substr(start));
        break;
      }
      f.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (f.size() != 16) throw ParseError("results csv: bad field count", line_no);
    ExperimentResult r;
    r.dataset = f[0];
    r.architecture = f[1];
    r.strategy = f[2];
    r.seed = static_cast<std::uint64_t>(std::stoull(f[3]));
    r.metrics.precision = parse_double_field(f[4]);
    r.metrics.recall = parse_double_field(f[5]);
    r.metrics.specificity = parse_double_field(f[6]);
    r.metrics.f1 = parse_double_field(f[7]);
    r.metrics.balanced_accuracy = parse_double_field(f[8]);
    r.metrics.g_mean = parse_double_field(f[9]);
    r.metrics.auc = parse_double_field(f[10]);
    r.wall_time_s = parse_double_field(f[11]);
    r.model_memory_bytes = static_cast<std::size_t>(std::stoull(f[12]));
    r.n_synthetic = static_cast<std::size_t>(std::stoull(f[13]));
    r.n_removed_tomek = static_cast<std::size_t>(std::stoull(f[14]));
    r.status = f[15];
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::string format_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c] << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << "\n";
  }
  return out.str();
}

std::string fmt_fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace

void emit_reports(const ExperimentConfig& config,
                  const std::vector<ExperimentResult>& results,
                  const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  const auto base = std::filesystem::path(out_dir);

  write_results_csv(results, (base / "results.csv").string());

  const std::vector<ArmSummary> arms = aggregate(results);
  const std::vector<ComparisonRow> comparisons = statistical_report(results);

  json summary;
  summary["version"] = kVersion;
  summary["generated_at"] = utc_timestamp();
  summary["config"] = config_to_json(config);
  std::size_t ok = 0, failed = 0, error = 0;
  for (const ExperimentResult& r : results) {
    if (r.status == "ok") {
      ++ok;
    } else if (r.status == "failed") {
      ++failed;
    } else {
      ++error;
    }
  }
  summary["cells"] = {{"ok", ok}, {"failed", failed}, {"error", error}};
  json arms_json = json::array();
  for (const ArmSummary& a : arms) {
    json j;
    j["architecture"] = a.architecture;
    j["strategy"] = a.strategy;
    j["n_datasets"] = a.n_datasets;
    j["metric_mean"] = a.metric_mean;
    j["metric_sd"] = a.metric_sd;
    j["median_wall_time_s"] = a.median_wall_time_s;
    j["median_memory_bytes"] = a.median_memory_bytes;
    arms_json.push_back(j);
  }
  summary["aggregates"] = arms_json;
  json comp_json = json::array();
  for (const ComparisonRow& c : comparisons) {
    json j;
    j["comparison"] = c.comparison;
    j["metric"] = c.metric;
    j["computable"] = c.computable;
    j["p"] = c.p;
    j["d"] = c.d;
    j["n"] = c.n;
    j["outcome"] = c.outcome;
    comp_json.push_back(j);
  }
  summary["statistics"] = comp_json;
  // Cohen's d here is the paired difference-score variant (d_z).
  summary["notes"] = {
      {"effect_size", "d_z (paired): mean(diff)/sd(diff)"},
      {"aggregation", "per-dataset seed medians, then mean across datasets"},
      {"pairing", "per-dataset seed-medians as paired observations"},
  };
  {
    std::ofstream out(base / "summary.json", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write summary.json");
    out << summary.dump(2) << "\n";
  }

  // Plain-text tables: datasets, hyperparameters, aggregates, statistics.
  std::ostringstream text;
  {
    std::vector<std::vector<std::string>> t;
    t.push_back({"dataset", "features", "instances", "imbalance_ratio"});
    try {
      for (const ManifestEntry& e : load_manifest(config.manifest_path)) {
        t.push_back({e.name, std::to_string(e.expected_features),
                     std::to_string(e.expected_instances),
                     fmt_fixed(e.expected_ir, 2)});
      }
    } catch (const Error&) {
      t.push_back({"(manifest unavailable)", "-", "-", "-"});
    }
    text << "== Datasets ==\n" << format_table(t) << "\n";
  }
  {
    std::vector<std::vector<std::string>> t;
    t.push_back({"dataset", "widths", "k", "grid", "learning_rate"});
    std::set<std::string> names;
    for (const ExperimentResult& r : results) names.insert(r.dataset);
    for (const std::string& name : names) {
      const KanHyperparams hp = hyperparams_for(config, name);
      std::string w = "[";
      for (std::size_t i = 0; i < hp.hidden_widths.size(); ++i) {
        w += (i ? ", " : "") + std::to_string(hp.hidden_widths[i]);
      }
      w += "]";
      t.push_back({name, w, std::to_string(hp.order), std::to_string(hp.grid),
                   fmt_fixed(hp.learning_rate, 5)});
    }
    text << "== Hyperparameters ==\n" << format_table(t) << "\n";
  }
  {
    std::vector<std::vector<std::string>> t;
    std::vector<std::string> head = {"architecture", "strategy"};
    for (const std::string& m : metric_names()) head.push_back(m);
    head.push_back("median_time_s");
    head.push_back("median_memory_B");
    t.push_back(head);
    for (const ArmSummary& a : arms) {
      std::vector<std::string> row = {a.architecture, a.strategy};
      for (const std::string& m : metric_names()) {
        row.push_back(fmt_fixed(a.metric_mean.at(m)));
      }
      row.push_back(fmt_fixed(a.median_wall_time_s));
      row.push_back(fmt_fixed(a.median_memory_bytes, 0));
      t.push_back(row);
    }
    text << "== Aggregates (seed-median per dataset, mean across datasets) ==\n"
         << format_table(t) << "\n";
  }
  {
    std::vector<std::vector<std::string>> t;
    t.push_back({"comparison", "metric", "p", "d", "n", "outcome"});
    for (const ComparisonRow& c : comparisons) {
      t.push_back({c.comparison, c.metric,
                   c.computable && !c.degenerate ? fmt_fixed(c.p) : "-",
                   c.computable && !c.degenerate ? fmt_fixed(c.d, 2) : "-",
                   std::to_string(c.n), c.outcome});
    }
    text << "== Statistical tests ==\n" << format_table(t);
  }
  {
    std::ofstream out(base / "tables.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write tables.txt");
    out << text.str();
  }
}

std::vector<DatasetCheck> validate_manifest(const std::string& manifest_path) {
  std::vector<DatasetCheck> checks;
  for (const ManifestEntry& e : load_manifest(manifest_path)) {
    DatasetCheck c;
    c.name = e.name;
    try {
      if (!e.sha256.empty()) {
        const std::string got = sha256_file_hex(e.path);
        if (got != e.sha256) {
          c.detail = "sha256 mismatch: got " + got;
          checks.push_back(c);
          continue;
        }
      }
      const RawDataset raw = load_keel_file(e.path);
      const BinaryDataset bin = binarize_ova(raw);
      c.instances = raw.n_instances();
      c.features = raw.n_features();
      c.imbalance_ratio = bin.imbalance_ratio;
      std::string problems;
      if (e.expected_instances && raw.n_instances() != e.expected_instances) {
        problems += "instances " + std::to_string(raw.n_instances()) +
                    " != " + std::to_string(e.expected_instances) + "; ";
      }
      if (e.expected_features && raw.n_features() != e.expected_features) {
        problems += "features " + std::to_string(raw.n_features()) +
                    " != " + std::to_string(e.expected_features) + "; ";
      }
      if (e.expected_ir > 0.0 &&
          std::fabs(bin.imbalance_ratio - e.expected_ir) > 0.1) {
        problems += "imbalance ratio " + fmt_fixed(bin.imbalance_ratio, 3) +
                    " not within 0.1 of " + fmt_fixed(e.expected_ir, 3) + "; ";
      }
      c.ok = problems.empty();
      c.detail = c.ok ? "ok" : problems;
    } catch (const Error& err) {
      c.detail = err.what();
    }
    checks.push_back(c);
  }
  return checks;
}

}  // namespace kanbench
