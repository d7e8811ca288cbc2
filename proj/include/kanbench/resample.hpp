#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kanbench/matrix.hpp"

namespace kanbench {

struct ResamplePlan {
  int k_neighbors = 5;
  double target_ratio = 1.0;  // post-oversampling minority/majority
  std::uint64_t seed = 0;
};

struct SmoteResult {
  Matrix features;
  std::vector<int> labels;
  std::size_t n_synthetic = 0;
};

struct ResampleOutcome {
  Matrix features;
  std::vector<int> labels;
  std::size_t n_synthetic = 0;
  std::size_t n_removed_by_tomek = 0;
};

// Minority oversampling: synthetic points on segments between a minority
// point and one of its k nearest minority neighbours (Euclidean), until
// minority reaches ceil(target_ratio * majority).
SmoteResult smote(const Matrix& features, const std::vector<int>& labels,
                  const ResamplePlan& plan);

// Cross-class mutual nearest-neighbour pairs (i < j); distance ties break
// to the lower index.
std::vector<std::pair<std::size_t, std::size_t>> tomek_links(
    const Matrix& features, const std::vector<int>& labels);

// SMOTE first, then Tomek links on the augmented set; only the majority
// member of each link is dropped.
ResampleOutcome smote_tomek(const Matrix& features,
                            const std::vector<int>& labels,
                            const ResamplePlan& plan);

}  // namespace kanbench
