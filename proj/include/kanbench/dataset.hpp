#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kanbench/matrix.hpp"

namespace kanbench {

// A parsed KEEL-format file: numeric feature columns plus the class column.
struct RawDataset {
  std::string name;
  std::vector<std::string> feature_names;
  Matrix features;                  // n_instances x n_features
  std::vector<std::string> labels;  // raw class token per row

  std::size_t n_instances() const { return features.rows(); }
  std::size_t n_features() const { return features.cols(); }
};

// One-vs-all binarized view: label 1 is the minority class.
struct BinaryDataset {
  Matrix features;
  std::vector<int> labels;
  std::string minority_label;
  std::size_t minority_count = 0;
  std::size_t majority_count = 0;
  double imbalance_ratio = 1.0;
};

// Per-feature min-max bounds, fitted on training rows only.
struct Scaler {
  std::vector<double> min;
  std::vector<double> max;
};

struct Split {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

RawDataset parse_keel(const std::string& content);
RawDataset load_keel_file(const std::string& path);
std::string serialize_keel(const RawDataset& data);

BinaryDataset binarize_ova(const RawDataset& raw);

Scaler fit_scaler(const Matrix& features,
                  std::span<const std::size_t> train_indices);
// Maps every value to (x - min) / (max - min) clamped into [0, 1];
// constant columns map to 0.5.
Matrix transform(const Scaler& scaler, const Matrix& features);

// Per-class allocation: the test side receives round(count * fraction) rows
// of each class, at least 1 and at most count - 1. Deterministic per seed.
Split stratified_split(const BinaryDataset& data, double test_fraction,
                       std::uint64_t seed);

struct ManifestEntry {
  std::string name;
  std::string path;  // relative paths resolve against the manifest directory
  std::string url;
  std::string sha256;
  std::size_t expected_instances = 0;
  std::size_t expected_features = 0;
  double expected_ir = 0.0;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_file_hex(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace kanbench
