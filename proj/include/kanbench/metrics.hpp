#pragma once

#include <span>

namespace kanbench {

// Binary confusion counts; the positive class is the minority label 1.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct MetricBundle {
  double precision = 0.0;
  double recall = 0.0;
  double specificity = 0.0;
  double f1 = 0.0;
  double balanced_accuracy = 0.0;
  double g_mean = 0.0;
  double auc = 0.0;
};

ConfusionCounts confusion(std::span<const int> y_true,
                          std::span<const int> y_pred);

// All ratio metrics with the 0/0 -> 0 convention; auc left as NaN for the
// caller to fill from scores.
MetricBundle bundle_from_counts(const ConfusionCounts& c);

// Normalized Mann-Whitney U with average ranks for ties.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

}  // namespace kanbench
