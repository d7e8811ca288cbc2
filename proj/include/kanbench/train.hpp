#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "kanbench/losses.hpp"
#include "kanbench/matrix.hpp"
#include "kanbench/models.hpp"

namespace kanbench {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
};

// Standard Adam update with bias correction; state is lazily sized on the
// first call and must stay congruent afterwards.
void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state, double learning_rate,
               const AdamConfig& cfg = {});

enum class LossKind { kCrossEntropy, kFocal };

struct LossSpec {
  LossKind kind = LossKind::kCrossEntropy;
  ClassWeights weights;  // cross-entropy only
  FocalParams focal;     // focal only
};

// Halts training once the validation balanced accuracy has gone `patience`
// epochs without a new best, after it has improved at least once over its
// starting level. The final parameters are kept as trained.
struct EarlyStopConfig {
  int patience = 30;
  double val_fraction = 0.1;  // stratified holdout taken from the train data
};

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 300;
  AdamConfig adam;
  LossSpec loss;
  std::uint64_t seed = 0;
  std::optional<EarlyStopConfig> early_stop;
  std::ostream* epoch_log = nullptr;  // CSV rows: epoch,loss,val_balanced_accuracy
};

struct TrainReport {
  std::vector<double> epoch_losses;  // [0] is the pre-update baseline
  double wall_time_seconds = 0.0;
  std::size_t model_memory_bytes = 0;  // parameters plus Adam moments
  int epochs_run = 0;
  long steps_run = 0;
  double best_val_balacc = 0.0;  // meaningful only with early stopping
};

// Trains in place; the model holds the final parameters.
TrainReport train_kan(KanModel& model, const Matrix& features,
                      const std::vector<int>& labels, const TrainConfig& cfg);
TrainReport train_mlp(MlpModel& model, const Matrix& features,
                      const std::vector<int>& labels, const TrainConfig& cfg);

LossResult evaluate_loss(const LossSpec& spec, const Matrix& logits,
                         const std::vector<int>& labels);

}  // namespace kanbench
