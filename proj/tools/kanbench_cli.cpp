#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kanbench/dataset.hpp"
#include "kanbench/errors.hpp"
#include "kanbench/harness.hpp"
#include "kanbench/version.hpp"

namespace {

using namespace kanbench;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& manifest,
            const std::string& datasets, const std::string& strategies,
            const std::string& architectures, const std::string& seeds,
            const std::string& out_dir, int jobs, bool sequential_timing,
            bool parallel_timing, int max_epochs, bool train_logs) {
  ExperimentConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (!manifest.empty()) cfg.manifest_path = manifest;
  if (!datasets.empty()) cfg.datasets = split_list(datasets);
  if (!strategies.empty()) cfg.strategies = split_list(strategies);
  if (!architectures.empty()) cfg.architectures = split_list(architectures);
  if (!seeds.empty()) {
    cfg.seeds.clear();
    for (const std::string& s : split_list(seeds)) {
      cfg.seeds.push_back(std::stoull(s));
    }
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (cfg.out_dir.empty()) cfg.out_dir = "results";
  if (jobs > 0) cfg.jobs = jobs;
  if (sequential_timing) cfg.sequential_timing = true;
  if (parallel_timing) cfg.sequential_timing = false;
  if (max_epochs > 0) cfg.max_epochs = max_epochs;
  if (train_logs) cfg.train_logs = true;

  const auto results = run_experiment(cfg, &std::cout);
  emit_reports(cfg, results, cfg.out_dir);

  std::size_t bad = 0;
  for (const auto& r : results) {
    if (r.status != "ok") ++bad;
  }
  std::cout << "wrote " << cfg.out_dir << "/results.csv (" << results.size()
            << " rows, " << bad << " not ok)\n";
  return bad == 0 ? 0 : 1;
}

int cmd_fetch(const std::string& manifest_path, bool force) {
  int failures = 0;
  for (const ManifestEntry& e : load_manifest(manifest_path)) {
    if (!force && std::filesystem::exists(e.path)) {
      if (e.sha256.empty() || sha256_file_hex(e.path) == e.sha256) {
        std::cout << e.name << ": present\n";
        continue;
      }
      std::cout << e.name << ": checksum mismatch, refetching\n";
    }
    if (e.url.empty()) {
      std::cout << e.name << ": no url in manifest, skipped\n";
      continue;
    }
    const std::size_t host_end = e.url.find('/', e.url.find("//") + 2);
    const std::string base = e.url.substr(0, host_end);
    const std::string path = host_end == std::string::npos ? "/" : e.url.substr(host_end);
    httplib::Client client(base);
    client.set_follow_location(true);
    const auto res = client.Get(path);
    if (!res || res->status != 200) {
      std::cerr << e.name << ": download failed (" << e.url << ")\n";
      ++failures;
      continue;
    }
    const std::string got = sha256_hex(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(res->body.data()),
        res->body.size()));
    if (!e.sha256.empty() && got != e.sha256) {
      std::cerr << e.name << ": checksum mismatch after download\n";
      ++failures;
      continue;
    }
    std::filesystem::create_directories(
        std::filesystem::path(e.path).parent_path());
    std::ofstream out(e.path, std::ios::binary | std::ios::trunc);
    out << res->body;
    std::cout << e.name << ": fetched " << res->body.size() << " bytes\n";
  }
  return failures == 0 ? 0 : 1;
}

int cmd_report(const std::string& results_path, const std::string& format) {
  const auto results = read_results_csv(results_path);
  const auto arms = aggregate(results);
  const auto comparisons = statistical_report(results);

  if (format == "json") {
    nlohmann::json doc;
    doc["version"] = kVersion;
    nlohmann::json arms_json = nlohmann::json::array();
    for (const ArmSummary& a : arms) {
      arms_json.push_back({{"architecture", a.architecture},
                           {"strategy", a.strategy},
                           {"n_datasets", a.n_datasets},
                           {"metric_mean", a.metric_mean},
                           {"metric_sd", a.metric_sd},
                           {"median_wall_time_s", a.median_wall_time_s},
                           {"median_memory_bytes", a.median_memory_bytes}});
    }
    doc["aggregates"] = arms_json;
    nlohmann::json comp = nlohmann::json::array();
    for (const ComparisonRow& c : comparisons) {
      comp.push_back({{"comparison", c.comparison},
                      {"metric", c.metric},
                      {"computable", c.computable},
                      {"p", c.p},
                      {"d", c.d},
                      {"n", c.n},
                      {"outcome", c.outcome}});
    }
    doc["statistics"] = comp;
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  if (format == "csv") {
    std::cout << "architecture,strategy";
    for (const std::string& m : metric_names()) std::cout << "," << m;
    std::cout << ",median_wall_time_s,median_memory_bytes\n";
    for (const ArmSummary& a : arms) {
      std::cout << a.architecture << "," << a.strategy;
      for (const std::string& m : metric_names()) {
        std::cout << "," << a.metric_mean.at(m);
      }
      std::cout << "," << a.median_wall_time_s << "," << a.median_memory_bytes
                << "\n";
    }
    return 0;
  }

  // table
  std::cout << "architecture  strategy   ";
  for (const std::string& m : metric_names()) std::cout << m << "  ";
  std::cout << "\n";
  for (const ArmSummary& a : arms) {
    std::cout << a.architecture << "  " << a.strategy << "  ";
    for (const std::string& m : metric_names()) {
      std::cout << a.metric_mean.at(m) << "  ";
    }
    std::cout << "\n";
  }
  std::cout << "\ncomparison | metric | p | d | outcome\n";
  for (const ComparisonRow& c : comparisons) {
    std::cout << c.comparison << " | " << c.metric << " | " << c.p << " | "
              << c.d << " | " << c.outcome << "\n";
  }
  return 0;
}

int cmd_validate(const std::string& manifest_path) {
  int bad = 0;
  for (const DatasetCheck& c : validate_manifest(manifest_path)) {
    std::cout << c.name << ": " << (c.ok ? "ok" : c.detail);
    if (c.instances > 0) {
      std::cout << " (features=" << c.features << " instances=" << c.instances
                << " ir=" << c.imbalance_ratio << ")";
    }
    std::cout << "\n";
    if (!c.ok) ++bad;
  }
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KAN vs MLP benchmark harness for imbalanced tabular data"};
  app.set_version_flag("--version", kanbench::kVersion);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the experiment grid");
  std::string config_path, manifest, datasets, strategies, architectures, seeds,
      out_dir;
  int jobs = 0, max_epochs = 0;
  bool seq_timing = false, par_timing = false, train_logs = false;
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--manifest", manifest, "dataset manifest path");
  run->add_option("--datasets", datasets, "comma-separated dataset names");
  run->add_option("--strategies", strategies, "subset of baseline,resampled,focal");
  run->add_option("--architectures", architectures, "subset of kan,mlp");
  run->add_option("--seeds", seeds, "comma-separated integer seeds");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--jobs", jobs, "worker threads (with --parallel-timing)");
  run->add_option("--max-epochs", max_epochs, "override the epoch budget");
  run->add_flag("--sequential-timing", seq_timing,
                "run cells sequentially for honest wall times (default)");
  run->add_flag("--parallel-timing", par_timing,
                "allow parallel cells; wall times become noisy");
  run->add_flag("--train-logs", train_logs, "write per-cell epoch logs");

  auto* fetch = app.add_subcommand("fetch", "download datasets from the manifest");
  std::string fetch_manifest = "data/manifest.json";
  bool force = false;
  fetch->add_option("--manifest", fetch_manifest, "dataset manifest path");
  fetch->add_flag("--force", force, "refetch even when files are present");

  auto* report = app.add_subcommand("report", "aggregate a results csv");
  std::string results_path = "results/results.csv", format = "table";
  report->add_option("--results", results_path, "results.csv path");
  report->add_option("--format", format, "csv|json|table")
      ->check(CLI::IsMember({"csv", "json", "table"}));

  auto* validate = app.add_subcommand("validate-data",
                                      "check manifest expectations against files");
  std::string validate_manifest_path = "data/manifest.json";
  validate->add_option("--manifest", validate_manifest_path, "manifest path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, manifest, datasets, strategies, architectures,
                     seeds, out_dir, jobs, seq_timing, par_timing, max_epochs,
                     train_logs);
    }
    if (fetch->parsed()) return cmd_fetch(fetch_manifest, force);
    if (report->parsed()) return cmd_report(results_path, format);
    if (validate->parsed()) return cmd_validate(validate_manifest_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
