#pragma once

#include <vector>

#include "kanbench/matrix.hpp"

namespace kanbench {

// Focal loss parameters: per-class weights alpha and focusing exponent gamma.
struct FocalParams {
  double gamma = 2.0;
  double alpha0 = 1.0;
  double alpha1 = 1.0;
};

struct ClassWeights {
  double w0 = 1.0;
  double w1 = 1.0;
};

struct Probs2 {
  double p0 = 0.5;
  double p1 = 0.5;
};

struct LossResult {
  double loss = 0.0;
  Matrix dlogits;  // n x 2, includes the 1/n batch-mean factor
};

// Two-way softmax with max subtraction.
Probs2 softmax2(double z0, double z1);

// Mean of -w_y * log p_y over the batch.
LossResult cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                         ClassWeights weights = {});

// Mean of -alpha_y * (1 - p_y)^gamma * log p_y; reduces exactly to
// cross_entropy at gamma = 0, alpha = (1, 1).
LossResult focal_loss(const Matrix& logits, const std::vector<int>& labels,
                      const FocalParams& params);

}  // namespace kanbench
