#include "kanbench/dataset.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "kanbench/errors.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

namespace {

std::string strip(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      tokens.push_back(strip(std::string_view(line).substr(start)));
      break;
    }
    tokens.push_back(strip(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return tokens;
}

double parse_numeric(const std::string& token, int line_no) {
  if (token.empty()) throw ParseError("missing value", line_no);
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("non-numeric feature token '" + token + "'", line_no);
  }
  return value;
}

// "@attribute name type ..." -> attribute name (second whitespace token).
std::string attribute_name(const std::string& body, int line_no) {
  std::istringstream in(body);
  std::string keyword, name;
  in >> keyword >> name;
  if (name.empty()) throw ParseError("@attribute without a name", line_no);
  return name;
}

}  // namespace

RawDataset parse_keel(const std::string& content) {
  RawDataset out;
  std::vector<std::string> attribute_names;
  std::vector<std::vector<double>> rows;
  bool seen_relation = false;
  bool in_data = false;
  int line_no = 0;

  std::istringstream stream(content);
  std::string raw_line;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    if (!raw_line.empty() && raw_line.back() == '\r') raw_line.pop_back();
    const std::string line = strip(raw_line);
    if (line.empty() || line[0] == '%') continue;

    if (!in_data && line[0] == '@') {
      std::istringstream header(line);
      std::string keyword;
      header >> keyword;
      const std::string kw = lower(keyword);
      if (kw == "@relation") {
        std::string name;
        header >> name;
        if (name.empty()) throw ParseError("@relation without a name", line_no);
        out.name = name;
        seen_relation = true;
      } else if (kw == "@attribute") {
        attribute_names.push_back(attribute_name(line, line_no));
      } else if (kw == "@inputs" || kw == "@outputs") {
        if (attribute_names.empty()) {
          throw ParseError(kw + " before any @attribute", line_no);
        }
        std::string rest;
        std::getline(header, rest);
        for (const std::string& name : split_csv(strip(rest))) {
          if (name.empty()) continue;
          if (std::find(attribute_names.begin(), attribute_names.end(), name) ==
              attribute_names.end()) {
            throw ParseError(kw + " names unknown attribute '" + name + "'",
                             line_no);
          }
        }
      } else if (kw == "@data") {
        if (!seen_relation) throw ParseError("@data before @relation", line_no);
        if (attribute_names.size() < 2) {
          throw ParseError("need at least one feature and a class attribute",
                           line_no);
        }
        in_data = true;
      } else {
        throw ParseError("unknown header keyword '" + keyword + "'", line_no);
      }
      continue;
    }

    if (!in_data) throw ParseError("data row before @data marker", line_no);

    const std::vector<std::string> tokens = split_csv(line);
    if (tokens.size() != attribute_names.size()) {
      throw ParseError("row has " + std::to_string(tokens.size()) +
                           " values, expected " +
                           std::to_string(attribute_names.size()),
                       line_no);
    }
    std::vector<double> row(tokens.size() - 1);
    for (std::size_t c = 0; c + 1 < tokens.size(); ++c) {
      row[c] = parse_numeric(tokens[c], line_no);
    }
    rows.push_back(std::move(row));
    out.labels.push_back(tokens.back());
    if (out.labels.back().empty()) throw ParseError("missing class label", line_no);
  }

  if (!seen_relation) throw ParseError("missing @relation header");
  if (!in_data) throw ParseError("missing @data marker");
  if (rows.size() < 2) throw ParseError("fewer than 2 data rows");

  out.feature_names.assign(attribute_names.begin(), attribute_names.end() - 1);
  out.features = Matrix(rows.size(), out.feature_names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < out.feature_names.size(); ++c) {
      out.features(r, c) = rows[r][c];
    }
  }
  return out;
}

RawDataset load_keel_file(const std::string& path) {
  return parse_keel(read_text_file(path));
}

std::string serialize_keel(const RawDataset& data) {
  std::ostringstream out;
  out << "@relation " << data.name << "\n";
  char buf[64];
  for (std::size_t c = 0; c < data.n_features(); ++c) {
    double lo = data.features(0, c), hi = lo;
    for (std::size_t r = 1; r < data.n_instances(); ++r) {
      lo = std::min(lo, data.features(r, c));
      hi = std::max(hi, data.features(r, c));
    }
    out << "@attribute " << data.feature_names[c] << " real [";
    std::snprintf(buf, sizeof buf, "%.17g", lo);
    out << buf << ", ";
    std::snprintf(buf, sizeof buf, "%.17g", hi);
    out << buf << "]\n";
  }
  std::vector<std::string> classes;
  for (const std::string& label : data.labels) {
    if (std::find(classes.begin(), classes.end(), label) == classes.end()) {
      classes.push_back(label);
    }
  }
  out << "@attribute Class {";
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out << (i ? ", " : "") << classes[i];
  }
  out << "}\n@inputs ";
  for (std::size_t c = 0; c < data.n_features(); ++c) {
    out << (c ? ", " : "") << data.feature_names[c];
  }
  out << "\n@outputs Class\n@data\n";
  for (std::size_t r = 0; r < data.n_instances(); ++r) {
    for (std::size_t c = 0; c < data.n_features(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", data.features(r, c));
      out << buf << ", ";
    }
    out << data.labels[r] << "\n";
  }
  return out.str();
}

BinaryDataset binarize_ova(const RawDataset& raw) {
  std::map<std::string, std::size_t> counts;
  for (const std::string& label : raw.labels) ++counts[label];
  if (counts.size() < 2) {
    throw DegenerateDataset("dataset '" + raw.name + "' has a single class");
  }
  // Smallest class wins; frequency ties break to the lexicographically
  // smallest name (std::map iterates names in order).
  std::string minority;
  std::size_t best = raw.labels.size() + 1;
  for (const auto& [label, count] : counts) {
    if (count < best) {
      best = count;
      minority = label;
    }
  }

  BinaryDataset out;
  out.features = raw.features;
  out.minority_label = minority;
  out.labels.reserve(raw.labels.size());
  for (const std::string& label : raw.labels) {
    out.labels.push_back(label == minority ? 1 : 0);
  }
  out.minority_count = best;
  out.majority_count = raw.labels.size() - best;
  out.imbalance_ratio = static_cast<double>(out.majority_count) /
                        static_cast<double>(out.minority_count);
  return out;
}

Scaler fit_scaler(const Matrix& features,
                  std::span<const std::size_t> train_indices) {
  if (train_indices.empty()) throw ShapeError("fit_scaler: empty index set");
  Scaler s;
  s.min.assign(features.cols(), 0.0);
  s.max.assign(features.cols(), 0.0);
  for (std::size_t c = 0; c < features.cols(); ++c) {
    double lo = features(train_indices[0], c);
    double hi = lo;
    for (std::size_t i : train_indices) {
      lo = std::min(lo, features(i, c));
      hi = std::max(hi, features(i, c));
    }
    s.min[c] = lo;
    s.max[c] = hi;
  }
  return s;
}

Matrix transform(const Scaler& scaler, const Matrix& features) {
  if (features.cols() != scaler.min.size()) {
    throw ShapeError("transform: column count does not match scaler");
  }
  Matrix out(features.rows(), features.cols());
  for (std::size_t c = 0; c < features.cols(); ++c) {
    const double lo = scaler.min[c];
    const double range = scaler.max[c] - lo;
    for (std::size_t r = 0; r < features.rows(); ++r) {
      if (range == 0.0) {
        out(r, c) = 0.5;
      } else {
        out(r, c) = std::clamp((features(r, c) - lo) / range, 0.0, 1.0);
      }
    }
  }
  return out;
}

Split stratified_split(const BinaryDataset& data, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DomainError("test_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    by_class[data.labels[i]].push_back(i);
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].size() < 2) {
      throw DegenerateDataset("class " + std::to_string(c) +
                              " has fewer than 2 instances");
    }
  }

  Split split;
  split.seed = seed;
  Rng rng(mix_seed(seed, hash_str("stratified_split")));
  for (int c = 0; c < 2; ++c) {
    auto& pool = by_class[c];
    rng.shuffle(pool);
    const auto want = static_cast<std::size_t>(
        std::lround(static_cast<double>(pool.size()) * test_fraction));
    const std::size_t n_test = std::clamp<std::size_t>(want, 1, pool.size() - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      (i < n_test ? split.test_indices : split.train_indices).push_back(pool[i]);
    }
  }
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("manifest must be a JSON object");

  const auto base = std::filesystem::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  for (const auto& [name, body] : doc.items()) {
    ManifestEntry e;
    e.name = name;
    for (const auto& [key, value] : body.items()) {
      if (key == "path") {
        e.path = value.get<std::string>();
      } else if (key == "url") {
        e.url = value.get<std::string>();
      } else if (key == "sha256") {
        e.sha256 = value.get<std::string>();
      } else if (key == "expected_instances") {
        e.expected_instances = value.get<std::size_t>();
      } else if (key == "expected_features") {
        e.expected_features = value.get<std::size_t>();
      } else if (key == "expected_ir") {
        e.expected_ir = value.get<double>();
      } else {
        throw ParseError("manifest entry '" + name + "' has unknown key '" +
                         key + "'");
      }
    }
    if (e.path.empty()) {
      throw ParseError("manifest entry '" + name + "' lacks a path");
    }
    const std::filesystem::path p(e.path);
    if (p.is_relative()) e.path = (base / p).string();
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  return entries;
}

std::string sha256_hex(std::span<const unsigned char> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw IoError("sha256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file_hex(const std::string& path) {
  const std::string content = read_text_file(path);
  return sha256_hex(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(content.data()), content.size()));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace kanbench
