#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "kanbench/dataset.hpp"
#include "kanbench/errors.hpp"
#include "kanbench/rng.hpp"

using namespace kanbench;

namespace {

const std::string kTinyFile =
    "@relation tiny\n"
    "@attribute X real [0.0, 1.0]\n"
    "@attribute Class {a, b}\n"
    "@data\n"
    "0.0, a\n"
    "1.0, b\n";

std::string corpus_path(const std::string& name) {
  return std::string(KANBENCH_SOURCE_DIR) + "/data/keel/" + name + ".dat";
}

std::string corpus_manifest() {
  return std::string(KANBENCH_SOURCE_DIR) + "/data/manifest.json";
}

}  // namespace

TEST_CASE("minimal file parses") {
  const RawDataset d = parse_keel(kTinyFile);
  CHECK(d.name == "tiny");
  REQUIRE(d.n_features() == 1);
  REQUIRE(d.n_instances() == 2);
  CHECK(d.features(0, 0) == 0.0);
  CHECK(d.features(1, 0) == 1.0);
  CHECK(d.labels == std::vector<std::string>{"a", "b"});
}

TEST_CASE("keywords are case-insensitive and tokens are stripped") {
  const RawDataset d = parse_keel(
      "@RELATION weird\n"
      "@Attribute  f1  real\n"
      "@ATTRIBUTE f2 integer [0, 9]\n"
      "@attribute Class {x, y}\n"
      "@INPUTS f1, f2\n"
      "@OUTPUTS Class\n"
      "@DATA\n"
      "  0.5 ,  3 , x \n"
      "1.5, 4, y\n");
  CHECK(d.feature_names == std::vector<std::string>{"f1", "f2"});
  CHECK(d.features(0, 1) == 3.0);
  CHECK(d.labels[0] == "x");
}

TEST_CASE("parse errors carry line numbers") {
  // Row arity violation under a 2-attribute header.
  const std::string bad =
      "@relation r\n@attribute A real\n@attribute Class {a, b}\n@data\n"
      "1.0, a\n1.0, 2.0, b\n";
  try {
    parse_keel(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 6);
    CHECK(std::string(e.what()).find("3 values") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_keel("@relation r\n@attribute A real\n"
                             "@attribute Class {a, b}\n@data\nx, a\n1, b\n"),
                  ParseError);
  // Missing value token.
  CHECK_THROWS_AS(parse_keel("@relation r\n@attribute A real\n"
                             "@attribute Class {a, b}\n@data\n, a\n1, b\n"),
                  ParseError);
  // Missing @data.
  CHECK_THROWS_AS(parse_keel("@relation r\n@attribute A real\n"), ParseError);
  // @inputs naming an unknown attribute.
  CHECK_THROWS_AS(parse_keel("@relation r\n@attribute A real\n"
                             "@attribute Class {a, b}\n@inputs Nope\n@data\n"
                             "1, a\n2, b\n"),
                  ParseError);
}

TEST_CASE("serialize/parse round trip preserves matrices and labels") {
  Rng rng(42);
  RawDataset d;
  d.name = "roundtrip";
  d.feature_names = {"u", "v", "w"};
  d.features = Matrix(20, 3);
  for (std::size_t r = 0; r < 20; ++r) {
    for (std::size_t c = 0; c < 3; ++c) d.features(r, c) = rng.normal(0, 3);
    d.labels.push_back(rng.uniform01() < 0.3 ? "pos" : "neg");
  }
  const RawDataset back = parse_keel(serialize_keel(d));
  CHECK(back.features == d.features);
  CHECK(back.labels == d.labels);
  CHECK(back.feature_names == d.feature_names);
}

TEST_CASE("binarize_ova picks the smallest class") {
  RawDataset d;
  d.name = "t";
  d.feature_names = {"x"};
  d.features = Matrix(3, 1);
  d.labels = {"a", "a", "b"};
  const BinaryDataset b = binarize_ova(d);
  CHECK(b.minority_label == "b");
  CHECK(b.labels == std::vector<int>{0, 0, 1});
  CHECK(b.minority_count == 1);
  CHECK(b.imbalance_ratio == doctest::Approx(2.0));

  // Frequency tie: lexicographically smallest name wins.
  d.features = Matrix(2, 1);
  d.labels = {"b", "a"};
  const BinaryDataset tie = binarize_ova(d);
  CHECK(tie.minority_label == "a");
  CHECK(tie.imbalance_ratio == doctest::Approx(1.0));
  CHECK(tie.labels == std::vector<int>{0, 1});

  d.labels = {"a", "a"};
  CHECK_THROWS_AS(binarize_ova(d), DegenerateDataset);
}

TEST_CASE("scaler fit and transform") {
  Matrix m(3, 2);
  m(0, 0) = 2;  m(0, 1) = 10;
  m(1, 0) = 4;  m(1, 1) = 20;
  m(2, 0) = 6;  m(2, 1) = 15;
  const std::vector<std::size_t> all = {0, 1, 2};
  const Scaler s = fit_scaler(m, all);
  CHECK(s.min == std::vector<double>{2, 10});
  CHECK(s.max == std::vector<double>{6, 20});

  Matrix q(3, 2);
  q(0, 0) = 6;  q(0, 1) = 10;   // max -> 1, min -> 0
  q(1, 0) = 8;  q(1, 1) = 25;   // clamped out-of-range
  q(2, 0) = 4;  q(2, 1) = 15;
  const Matrix t = transform(s, q);
  CHECK(t(0, 0) == doctest::Approx(1.0));
  CHECK(t(0, 1) == doctest::Approx(0.0));
  CHECK(t(1, 0) == doctest::Approx(1.0));
  CHECK(t(1, 1) == doctest::Approx(1.0));
  CHECK(t(2, 0) == doctest::Approx(0.5));

  // Constant column maps to 0.5.
  Matrix c(2, 1);
  c(0, 0) = 5;
  c(1, 0) = 5;
  const Scaler cs = fit_scaler(c, std::vector<std::size_t>{0, 1});
  CHECK(transform(cs, c)(0, 0) == doctest::Approx(0.5));

  // Output always inside [0, 1].
  Rng rng(3);
  Matrix wild(50, 2);
  for (auto& v : wild.data()) v = rng.normal(0, 100);
  const Matrix tw = transform(s, wild);
  for (double v : tw.data()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("stratified split allocates per class and is deterministic") {
  BinaryDataset d;
  d.features = Matrix(100, 1);
  d.labels.assign(100, 0);
  for (int i = 0; i < 10; ++i) d.labels[i] = 1;  // 10 minority, 90 majority
  d.minority_count = 10;
  d.majority_count = 90;

  const Split s = stratified_split(d, 0.2, 7);
  CHECK(s.test_indices.size() == 20);
  std::size_t test_minority = 0;
  for (std::size_t i : s.test_indices) test_minority += d.labels[i];
  CHECK(test_minority == 2);

  const Split again = stratified_split(d, 0.2, 7);
  CHECK(again.train_indices == s.train_indices);
  CHECK(again.test_indices == s.test_indices);
  const Split other = stratified_split(d, 0.2, 8);
  CHECK(other.test_indices != s.test_indices);

  // Disjoint and covering.
  std::set<std::size_t> seen(s.train_indices.begin(), s.train_indices.end());
  for (std::size_t i : s.test_indices) CHECK(seen.insert(i).second);
  CHECK(seen.size() == 100);

  BinaryDataset degenerate = d;
  degenerate.labels.assign(100, 0);
  degenerate.labels[0] = 1;
  CHECK_THROWS_AS(stratified_split(degenerate, 0.2, 1), DegenerateDataset);
  CHECK_THROWS_AS(stratified_split(d, 0.0, 1), DomainError);
}

TEST_CASE("bundled corpus matches its manifest expectations") {
  if (!std::filesystem::exists(corpus_manifest())) {
    MESSAGE("corpus not generated yet; skipping");
    return;
  }
  for (const ManifestEntry& e : load_manifest(corpus_manifest())) {
    const RawDataset raw = load_keel_file(e.path);
    const BinaryDataset bin = binarize_ova(raw);
    CHECK(raw.n_instances() == e.expected_instances);
    CHECK(raw.n_features() == e.expected_features);
    CHECK(std::fabs(bin.imbalance_ratio - e.expected_ir) <= 0.1);
    CHECK(sha256_file_hex(e.path) == e.sha256);
  }
}

TEST_CASE("yeast4 file parses to the published shape") {
  if (!std::filesystem::exists(corpus_path("yeast4"))) {
    MESSAGE("corpus not generated yet; skipping");
    return;
  }
  const RawDataset raw = load_keel_file(corpus_path("yeast4"));
  CHECK(raw.n_features() == 8);
  CHECK(raw.n_instances() == 1484);
  const BinaryDataset bin = binarize_ova(raw);
  CHECK(bin.minority_count == 51);
  CHECK(bin.majority_count == 1433);
  CHECK(bin.imbalance_ratio == doctest::Approx(28.098).epsilon(1e-3));

  const Split split = stratified_split(bin, 0.2, 11);
  CHECK(split.test_indices.size() == 297);  // round(51*.2) + round(1433*.2)
  std::size_t minority_in_test = 0;
  for (std::size_t i : split.test_indices) minority_in_test += bin.labels[i];
  CHECK(minority_in_test == 10);
}

TEST_CASE("manifest loader rejects unknown keys") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "kanbench_manifest_test";
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "m.json");
    out << R"({"d": {"path": "d.dat", "bogus": 1}})";
  }
  CHECK_THROWS_AS(load_manifest((dir / "m.json").string()), ParseError);
  fs::remove_all(dir);
}
