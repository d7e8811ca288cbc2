#include "kanbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "kanbench/errors.hpp"

namespace kanbench {

namespace {

double ratio_or_zero(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

ConfusionCounts confusion(std::span<const int> y_true,
                          std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw ShapeError("confusion: length mismatch");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if ((y_true[i] != 0 && y_true[i] != 1) || (y_pred[i] != 0 && y_pred[i] != 1)) {
      throw ShapeError("confusion: labels must be 0 or 1");
    }
    if (y_true[i] == 1) {
      ++(y_pred[i] == 1 ? c.tp : c.fn);
    } else {
      ++(y_pred[i] == 1 ? c.fp : c.tn);
    }
  }
  return c;
}

MetricBundle bundle_from_counts(const ConfusionCounts& c) {
  const double tp = static_cast<double>(c.tp);
  const double fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn);
  const double tn = static_cast<double>(c.tn);
  if (tp + fp + fn + tn == 0.0) throw EmptyBatch("metrics over zero instances");

  MetricBundle m;
  m.precision = ratio_or_zero(tp, tp + fp);
  m.recall = ratio_or_zero(tp, tp + fn);
  m.specificity = ratio_or_zero(tn, tn + fp);
  m.f1 = ratio_or_zero(2.0 * m.precision * m.recall, m.precision + m.recall);
  m.balanced_accuracy = 0.5 * (m.recall + m.specificity);
  m.g_mean = std::sqrt(m.recall * m.specificity);
  m.auc = std::numeric_limits<double>::quiet_NaN();
  return m;
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw ShapeError("roc_auc: length mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (int y : y_true) {
    if (y == 1) {
      ++n_pos;
    } else if (y == 0) {
      ++n_neg;
    } else {
      throw ShapeError("roc_auc: labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw UndefinedMetric("roc_auc needs both classes present");
  }

  std::vector<std::size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over tie groups, accumulate positive ranks.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t q = i; q <= j; ++q) {
      if (y_true[order[q]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }

  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
  return u / (np * nn);
}

}  // namespace kanbench
