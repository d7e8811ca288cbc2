#include "kanbench/resample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kanbench/errors.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

namespace {

double sq_distance(const Matrix& m, std::size_t a, std::size_t b) {
  double acc = 0.0;
  const auto ra = m.row(a);
  const auto rb = m.row(b);
  for (std::size_t c = 0; c < ra.size(); ++c) {
    const double d = ra[c] - rb[c];
    acc += d * d;
  }
  return acc;
}

}  // namespace

SmoteResult smote(const Matrix& features, const std::vector<int>& labels,
                  const ResamplePlan& plan) {
  if (features.rows() != labels.size()) {
    throw ShapeError("smote: feature rows do not match label count");
  }
  if (plan.k_neighbors < 1) throw ResampleError("k_neighbors must be >= 1");
  if (!(plan.target_ratio > 0.0 && plan.target_ratio <= 1.0)) {
    throw ResampleError("target_ratio must be in (0, 1]");
  }

  std::vector<std::size_t> minority;
  std::size_t majority_count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      minority.push_back(i);
    } else {
      ++majority_count;
    }
  }
  if (minority.size() < 2) {
    throw ResampleError("minority class needs at least 2 instances");
  }

  const auto target = static_cast<std::size_t>(
      std::ceil(plan.target_ratio * static_cast<double>(majority_count)));
  const std::size_t n_synthetic =
      target > minority.size() ? target - minority.size() : 0;

  SmoteResult out;
  out.n_synthetic = n_synthetic;
  out.features = Matrix(features.rows() + n_synthetic, features.cols());
  out.labels = labels;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      out.features(r, c) = features(r, c);
    }
  }
  if (n_synthetic == 0) return out;

  // k nearest minority neighbours of each minority point, ties by index.
  const int k = std::min<int>(plan.k_neighbors,
                              static_cast<int>(minority.size()) - 1);
  std::vector<std::vector<std::size_t>> neighbours(minority.size());
  std::vector<std::pair<double, std::size_t>> dists;
  for (std::size_t a = 0; a < minority.size(); ++a) {
    dists.clear();
    for (std::size_t b = 0; b < minority.size(); ++b) {
      if (b == a) continue;
      dists.emplace_back(sq_distance(features, minority[a], minority[b]),
                         minority[b]);
    }
    std::sort(dists.begin(), dists.end());
    neighbours[a].reserve(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) neighbours[a].push_back(dists[q].second);
  }

  Rng rng(mix_seed(plan.seed, hash_str("smote")));
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    const std::size_t a = s % minority.size();  // even coverage of the class
    const std::size_t base = minority[a];
    const std::size_t nn =
        neighbours[a][static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(k)))];
    const double u = rng.uniform01();
    const std::size_t r = features.rows() + s;
    for (std::size_t c = 0; c < features.cols(); ++c) {
      const double x = features(base, c);
      out.features(r, c) = x + u * (features(nn, c) - x);
    }
    out.labels.push_back(1);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> tomek_links(
    const Matrix& features, const std::vector<int>& labels) {
  if (features.rows() != labels.size()) {
    throw ShapeError("tomek_links: feature rows do not match label count");
  }
  const std::size_t n = features.rows();
  std::vector<std::size_t> nn(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t who = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = sq_distance(features, i, j);
      if (d < best) {  // ties keep the lower index, which arrives first
        best = d;
        who = j;
      }
    }
    nn[i] = who;
  }

  std::vector<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = nn[i];
    if (i < j && nn[j] == i && labels[i] != labels[j]) {
      links.emplace_back(i, j);
    }
  }
  return links;
}

ResampleOutcome smote_tomek(const Matrix& features,
                            const std::vector<int>& labels,
                            const ResamplePlan& plan) {
  SmoteResult oversampled = smote(features, labels, plan);
  const auto links = tomek_links(oversampled.features, oversampled.labels);

  std::vector<bool> drop(oversampled.labels.size(), false);
  std::size_t removed = 0;
  for (const auto& [i, j] : links) {
    const std::size_t majority_member = oversampled.labels[i] == 0 ? i : j;
    if (!drop[majority_member]) {
      drop[majority_member] = true;
      ++removed;
    }
  }

  ResampleOutcome out;
  out.n_synthetic = oversampled.n_synthetic;
  out.n_removed_by_tomek = removed;
  out.features = Matrix(oversampled.labels.size() - removed, features.cols());
  out.labels.reserve(oversampled.labels.size() - removed);
  std::size_t w = 0;
  for (std::size_t r = 0; r < oversampled.labels.size(); ++r) {
    if (drop[r]) continue;
    for (std::size_t c = 0; c < features.cols(); ++c) {
      out.features(w, c) = oversampled.features(r, c);
    }
    out.labels.push_back(oversampled.labels[r]);
    ++w;
  }
  return out;
}

}  // namespace kanbench
