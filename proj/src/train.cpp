#include "kanbench/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "kanbench/errors.hpp"
#include "kanbench/metrics.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double learning_rate, const AdamConfig& cfg) {
  if (params.size() != grads.size()) {
    throw ShapeError("adam_step: gradient size does not match parameters");
  }
  if (state.t == 0) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) {
    throw ShapeError("adam_step: state size does not match parameters");
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

LossResult evaluate_loss(const LossSpec& spec, const Matrix& logits,
                         const std::vector<int>& labels) {
  if (spec.kind == LossKind::kFocal) {
    return focal_loss(logits, labels, spec.focal);
  }
  return cross_entropy(logits, labels, spec.weights);
}

namespace {

struct KanOps {
  using Model = KanModel;
  using Cache = KanCache;
  static Matrix forward(const KanModel& m, const Matrix& x, KanCache* c) {
    return kan_forward(m, x, c);
  }
  static std::vector<double> backward_flat(const KanModel& m, const KanCache& c,
                                           const Matrix& dl) {
    return flatten_grad(kan_backward(m, c, dl));
  }
};

struct MlpOps {
  using Model = MlpModel;
  using Cache = MlpCache;
  static Matrix forward(const MlpModel& m, const Matrix& x, MlpCache* c) {
    return mlp_forward(m, x, c);
  }
  static std::vector<double> backward_flat(const MlpModel& m, const MlpCache& c,
                                           const Matrix& dl) {
    return flatten_grad(mlp_backward(m, c, dl));
  }
};

double balanced_accuracy_of(const Matrix& logits, const std::vector<int>& y) {
  std::vector<int> pred(y.size());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    pred[r] = logits(r, 1) > logits(r, 0) ? 1 : 0;
  }
  return bundle_from_counts(confusion(y, pred)).balanced_accuracy;
}

// Stratified holdout of round(count * fraction) rows per class, at least 1
// and at most count - 1, deterministic per seed.
void holdout_split(const std::vector<int>& labels, double fraction,
                   std::uint64_t seed, std::vector<std::size_t>& fit_idx,
                   std::vector<std::size_t>& val_idx) {
  std::vector<std::size_t> pools[2];
  for (std::size_t i = 0; i < labels.size(); ++i) pools[labels[i]].push_back(i);
  Rng rng(mix_seed(seed, hash_str("val-holdout")));
  for (auto& pool : pools) {
    rng.shuffle(pool);
    const auto want = static_cast<std::size_t>(
        std::lround(static_cast<double>(pool.size()) * fraction));
    const std::size_t n_val = std::clamp<std::size_t>(want, 1, pool.size() - 1);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      (i < n_val ? val_idx : fit_idx).push_back(pool[i]);
    }
  }
  std::sort(fit_idx.begin(), fit_idx.end());
  std::sort(val_idx.begin(), val_idx.end());
}

template <class Ops>
TrainReport run_training(typename Ops::Model& model, const Matrix& features,
                         const std::vector<int>& labels,
                         const TrainConfig& cfg) {
  if (features.rows() == 0) throw EmptyBatch("training set is empty");
  if (features.rows() != labels.size()) {
    throw ShapeError("feature rows do not match label count");
  }
  if (cfg.learning_rate <= 0.0) throw DomainError("learning_rate must be > 0");
  if (cfg.batch_size < 1) throw DomainError("batch_size must be >= 1");
  if (cfg.max_epochs < 1) throw DomainError("max_epochs must be >= 1");
  std::size_t class_count[2] = {0, 0};
  for (int y : labels) {
    if (y != 0 && y != 1) throw ShapeError("labels must be 0 or 1");
    ++class_count[y];
  }
  if (class_count[0] == 0 || class_count[1] == 0) {
    throw DegenerateDataset("training data must contain both classes");
  }

  // Optional validation holdout; early stopping silently degrades to a plain
  // epoch budget when a class is too small to stratify.
  std::vector<std::size_t> fit_idx, val_idx;
  const bool want_es = cfg.early_stop.has_value() &&
                       class_count[0] >= 2 && class_count[1] >= 2;
  if (want_es) {
    holdout_split(labels, cfg.early_stop->val_fraction, cfg.seed, fit_idx, val_idx);
  } else {
    fit_idx.resize(labels.size());
    std::iota(fit_idx.begin(), fit_idx.end(), 0);
  }
  const Matrix fit_x = gather_rows(features, fit_idx);
  const std::vector<int> fit_y = gather(labels, fit_idx);
  const Matrix val_x = want_es ? gather_rows(features, val_idx) : Matrix();
  const std::vector<int> val_y = want_es ? gather(labels, val_idx) : std::vector<int>();

  TrainReport report;
  report.model_memory_bytes = parameter_memory(model, 3);
  report.epoch_losses.push_back(
      evaluate_loss(cfg.loss, Ops::forward(model, fit_x, nullptr), fit_y).loss);

  std::vector<double> params = flatten_params(model);
  AdamState adam;
  Rng shuffle_rng(mix_seed(cfg.seed, hash_str("epoch-shuffle")));
  std::vector<std::size_t> order(fit_x.rows());
  std::iota(order.begin(), order.end(), 0);

  double best_val = -1.0;
  double start_val = -1.0;
  bool patience_armed = false;
  int since_best = 0;

  // Batch buffers and the cache live outside the loop so that steady-state
  // steps do not touch the allocator; wall times then reflect arithmetic.
  const auto batch_cap = static_cast<std::size_t>(cfg.batch_size);
  Matrix bx;
  std::vector<int> by;
  typename Ops::Cache cache;

  const auto t0 = std::chrono::steady_clock::now();
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_cap) {
      const std::size_t stop = std::min(order.size(), start + batch_cap);
      const std::size_t rows = stop - start;
      if (bx.rows() != rows) bx = Matrix(rows, fit_x.cols());
      by.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        const auto src = fit_x.row(order[start + r]);
        auto dst = bx.row(r);
        for (std::size_t c = 0; c < src.size(); ++c) dst[c] = src[c];
        by[r] = fit_y[order[start + r]];
      }

      LossResult lr;
      try {
        const Matrix logits = Ops::forward(model, bx, &cache);
        lr = evaluate_loss(cfg.loss, logits, by);
      } catch (const NumericError& e) {
        throw NumericDivergence(e.what(), epoch);
      }
      if (!std::isfinite(lr.loss)) {
        throw NumericDivergence("non-finite training loss", epoch);
      }
      epoch_loss += lr.loss * static_cast<double>(rows);

      const std::vector<double> grads = Ops::backward_flat(model, cache, lr.dlogits);
      adam_step(params, grads, adam, cfg.learning_rate, cfg.adam);
      unflatten_params(model, params);
      ++report.steps_run;
    }
    epoch_loss /= static_cast<double>(fit_x.rows());
    report.epoch_losses.push_back(epoch_loss);
    report.epochs_run = epoch;

    double val_balacc = 0.0;
    if (want_es) {
      val_balacc = balanced_accuracy_of(Ops::forward(model, val_x, nullptr), val_y);
      if (start_val < 0.0) start_val = val_balacc;
      if (val_balacc > best_val) {
        best_val = val_balacc;
        since_best = 0;
      } else {
        ++since_best;
      }
      // Patience arms once the metric has risen above both its starting
      // level and the constant-predictor level of 0.5; a run that has not
      // demonstrated learning keeps the full epoch budget instead of being
      // cut off before it starts.
      if (val_balacc > start_val && val_balacc > 0.5) patience_armed = true;
    }
    if (cfg.epoch_log) {
      (*cfg.epoch_log) << epoch << ',' << epoch_loss << ',' << val_balacc << '\n';
    }
    if (want_es && patience_armed && since_best >= cfg.early_stop->patience) break;
  }
  const auto t1 = std::chrono::steady_clock::now();
  report.wall_time_seconds = std::chrono::duration<double>(t1 - t0).count();
  if (want_es) report.best_val_balacc = best_val;
  return report;
}

}  // namespace

TrainReport train_kan(KanModel& model, const Matrix& features,
                      const std::vector<int>& labels, const TrainConfig& cfg) {
  return run_training<KanOps>(model, features, labels, cfg);
}

TrainReport train_mlp(MlpModel& model, const Matrix& features,
                      const std::vector<int>& labels, const TrainConfig& cfg) {
  return run_training<MlpOps>(model, features, labels, cfg);
}

}  // namespace kanbench
