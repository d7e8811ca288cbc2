#pragma once

#include <vector>

namespace kanbench {

// Two measurement sequences aligned by subject (here: by dataset).
struct PairedSample {
  std::vector<double> condition_a;
  std::vector<double> condition_b;
};

struct WilcoxonResult {
  double w = 0.0;        // min(W+, W-)
  double p = 1.0;        // two-sided
  int n_effective = 0;   // pairs left after dropping zero differences
  bool exact = true;
};

// Signed-rank test on a - b. Exact two-sided p by enumerating all 2^n sign
// assignments for n <= 20; normal approximation with continuity correction
// beyond that.
WilcoxonResult wilcoxon_signed_rank(const PairedSample& sample);

// Paired Cohen's d: mean(a - b) / sd(a - b), n-1 denominator.
double cohens_d_paired(const PairedSample& sample);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double effect_size_d = 0.0;
  int n_effective = 0;
};

}  // namespace kanbench
