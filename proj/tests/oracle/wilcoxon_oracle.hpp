#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

// Exact Wilcoxon signed-rank reference: ranks recomputed naively, two-sided
// p by enumerating all 2^n sign assignments. Intended for n <= 12.
namespace oracle {

struct WilcoxonOracleResult {
  double w = 0.0;
  double p = 1.0;
  int n = 0;
};

inline WilcoxonOracleResult oracle_wilcoxon(std::span<const double> diffs) {
  std::vector<double> d;
  for (double v : diffs) {
    if (v != 0.0) d.push_back(v);
  }
  const int n = static_cast<int>(d.size());
  WilcoxonOracleResult res;
  res.n = n;
  if (n == 0) return res;

  // Average ranks of |d|.
  std::vector<int> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int x, int y) {
    return std::fabs(d[x]) < std::fabs(d[y]);
  });
  std::vector<double> rank(d.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() &&
           std::fabs(d[idx[j + 1]]) == std::fabs(d[idx[i]])) {
      ++j;
    }
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t q = i; q <= j; ++q) rank[idx[q]] = avg;
    i = j + 1;
  }

  double w_plus = 0.0, total = 0.0;
  for (std::size_t q = 0; q < d.size(); ++q) {
    total += rank[q];
    if (d[q] > 0) w_plus += rank[q];
  }
  const double observed = std::min(w_plus, total - w_plus);
  res.w = observed;

  std::uint64_t hits = 0;
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double s = 0.0;
    for (int bit = 0; bit < n; ++bit) {
      if (mask & (1ULL << bit)) s += rank[static_cast<std::size_t>(bit)];
    }
    if (std::min(s, total - s) <= observed + 1e-12) ++hits;
  }
  res.p = static_cast<double>(hits) / static_cast<double>(count);
  return res;
}

}  // namespace oracle
