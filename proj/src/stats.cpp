#include "kanbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "kanbench/errors.hpp"

namespace kanbench {

namespace {

std::vector<double> average_ranks_of_abs(const std::vector<double>& diffs) {
  std::vector<std::size_t> idx(diffs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<double> ranks(diffs.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() &&
           std::fabs(diffs[idx[j + 1]]) == std::fabs(diffs[idx[i]])) {
      ++j;
    }
    const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t q = i; q <= j; ++q) ranks[idx[q]] = avg;
    i = j + 1;
  }
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample) {
  if (sample.condition_a.size() != sample.condition_b.size()) {
    throw ShapeError("paired sample lengths differ");
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < sample.condition_a.size(); ++i) {
    const double d = sample.condition_a[i] - sample.condition_b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  if (n < 2) {
    throw DegenerateTest("fewer than 2 nonzero differences");
  }

  const std::vector<double> ranks = average_ranks_of_abs(diffs);
  double w_plus = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    total += ranks[i];
    if (diffs[i] > 0.0) w_plus += ranks[i];
  }
  WilcoxonResult res;
  res.n_effective = n;
  res.w = std::min(w_plus, total - w_plus);

  if (n <= 20) {
    // Exact two-sided p over all sign assignments.
    const std::uint64_t count = 1ULL << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      double s = 0.0;
      for (int bit = 0; bit < n; ++bit) {
        if (mask & (1ULL << bit)) s += ranks[static_cast<std::size_t>(bit)];
      }
      if (std::min(s, total - s) <= res.w + 1e-12) ++hits;
    }
    res.p = static_cast<double>(hits) / static_cast<double>(count);
    res.exact = true;
  } else {
    // Normal approximation with continuity correction and tie correction.
    const double nd = n;
    const double mean = nd * (nd + 1.0) / 4.0;
    double tie_term = 0.0;
    std::vector<double> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
    const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (res.w - mean + 0.5) / std::sqrt(var);
    res.p = std::clamp(2.0 * normal_cdf(z), 0.0, 1.0);
    res.exact = false;
  }
  return res;
}

double cohens_d_paired(const PairedSample& sample) {
  if (sample.condition_a.size() != sample.condition_b.size()) {
    throw ShapeError("paired sample lengths differ");
  }
  const std::size_t n = sample.condition_a.size();
  if (n < 2) throw DegenerateTest("paired d needs at least 2 pairs");
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += sample.condition_a[i] - sample.condition_b[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = sample.condition_a[i] - sample.condition_b[i] - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) throw DegenerateTest("zero variance differences");
  return mean / sd;
}

}  // namespace kanbench
