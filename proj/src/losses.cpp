#include "kanbench/losses.hpp"

#include <algorithm>
#include <cmath>

#include "kanbench/errors.hpp"

namespace kanbench {

namespace {

constexpr double kProbFloor = 1e-12;

struct SoftmaxRow {
  double p0, p1;
  double logp0, logp1;
};

SoftmaxRow softmax_row(double z0, double z1) {
  if (!std::isfinite(z0) || !std::isfinite(z1)) {
    throw NumericError("softmax over non-finite logits");
  }
  const double m = std::max(z0, z1);
  const double e0 = std::exp(z0 - m);
  const double e1 = std::exp(z1 - m);
  const double sum = e0 + e1;
  SoftmaxRow r;
  r.p0 = e0 / sum;
  r.p1 = e1 / sum;
  // log of the clamped probability; keeps the loss bounded at extreme logits.
  r.logp0 = std::log(std::clamp(r.p0, kProbFloor, 1.0 - kProbFloor));
  r.logp1 = std::log(std::clamp(r.p1, kProbFloor, 1.0 - kProbFloor));
  return r;
}

void check_batch(const Matrix& logits, const std::vector<int>& labels) {
  if (logits.rows() == 0) throw EmptyBatch("loss over an empty batch");
  if (logits.cols() != 2) throw ShapeError("logits must have 2 columns");
  if (labels.size() != logits.rows()) {
    throw ShapeError("label count does not match logit rows");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw ShapeError("labels must be 0 or 1");
  }
}

}  // namespace

Probs2 softmax2(double z0, double z1) {
  const SoftmaxRow r = softmax_row(z0, z1);
  return {r.p0, r.p1};
}

LossResult cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                         ClassWeights weights) {
  check_batch(logits, labels);
  const std::size_t n = logits.rows();
  LossResult out;
  out.dlogits = Matrix(n, 2);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const SoftmaxRow s = softmax_row(logits(r, 0), logits(r, 1));
    const int y = labels[r];
    const double w = y == 1 ? weights.w1 : weights.w0;
    out.loss += -w * (y == 1 ? s.logp1 : s.logp0);
    out.dlogits(r, 0) = w * (s.p0 - (y == 0 ? 1.0 : 0.0)) * inv_n;
    out.dlogits(r, 1) = w * (s.p1 - (y == 1 ? 1.0 : 0.0)) * inv_n;
  }
  out.loss *= inv_n;
  return out;
}

LossResult focal_loss(const Matrix& logits, const std::vector<int>& labels,
                      const FocalParams& params) {
  check_batch(logits, labels);
  if (params.gamma < 0.0) throw DomainError("focal gamma must be >= 0");
  if (params.alpha0 <= 0.0 || params.alpha1 <= 0.0) {
    throw DomainError("focal alphas must be positive");
  }
  const std::size_t n = logits.rows();
  LossResult out;
  out.dlogits = Matrix(n, 2);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double g = params.gamma;
  for (std::size_t r = 0; r < n; ++r) {
    const SoftmaxRow s = softmax_row(logits(r, 0), logits(r, 1));
    const int y = labels[r];
    const double alpha = y == 1 ? params.alpha1 : params.alpha0;
    const double pt = std::clamp(y == 1 ? s.p1 : s.p0, kProbFloor, 1.0 - kProbFloor);
    const double logpt = y == 1 ? s.logp1 : s.logp0;
    const double one_minus = 1.0 - pt;
    const double mod = g == 0.0 ? 1.0 : std::pow(one_minus, g);

    out.loss += -alpha * mod * logpt;

    // dL/dz_j = [alpha*g*(1-pt)^(g-1)*pt*log(pt) - alpha*(1-pt)^g] * (d_tj - p_j)
    double bracket = -alpha * mod;
    if (g > 0.0) {
      bracket += alpha * g * std::pow(one_minus, g - 1.0) * pt * logpt;
    }
    const double d0 = (y == 0 ? 1.0 : 0.0) - s.p0;
    const double d1 = (y == 1 ? 1.0 : 0.0) - s.p1;
    out.dlogits(r, 0) = bracket * d0 * inv_n;
    out.dlogits(r, 1) = bracket * d1 * inv_n;
  }
  out.loss *= inv_n;
  return out;
}

}  // namespace kanbench
