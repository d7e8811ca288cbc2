#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kanbench/matrix.hpp"
#include "kanbench/spline.hpp"

namespace kanbench {

// One learnable univariate edge function:
//   phi(x) = w_b * silu(x) + w_s * sum_m c_m B_m(x)
struct EdgeFunction {
  double w_b = 0.0;
  double w_s = 0.0;
  std::vector<double> coefficients;
};

struct KanLayer {
  int in_dim = 0;
  int out_dim = 0;
  KnotVector knots;                 // shared by every edge of the layer
  std::vector<EdgeFunction> edges;  // out_dim x in_dim, row-major

  EdgeFunction& edge(int j, int i) { return edges[static_cast<std::size_t>(j) * in_dim + i]; }
  const EdgeFunction& edge(int j, int i) const {
    return edges[static_cast<std::size_t>(j) * in_dim + i];
  }
};

struct KanModel {
  std::vector<int> widths;  // full chain [d_in, hidden..., 2]
  int order = 0;
  int grid = 0;
  double domain_a = 0.0;
  double domain_b = 1.0;
  std::vector<KanLayer> layers;
};

struct KanLayerCache {
  Matrix input;                     // clamped values fed to the layer
  std::vector<std::uint8_t> open;   // 1 where the producing clamp was inactive
  std::vector<double> basis_vals;   // n * in * order
  std::vector<double> basis_ders;   // n * in * order
  std::vector<int> basis_first;     // n * in
  std::vector<double> silu_val;     // n * in
  std::vector<double> silu_der;     // n * in
};

struct KanCache {
  std::vector<KanLayerCache> layers;
  std::size_t n_rows = 0;
  std::uintptr_t model_tag = 0;
};

struct KanLayerGradient {
  std::vector<double> dw_b;   // out * in
  std::vector<double> dw_s;   // out * in
  std::vector<double> dcoef;  // out * in * basis_count
};

struct KanGradient {
  std::vector<KanLayerGradient> layers;
};

struct MlpModel {
  std::vector<int> widths;      // [d_in, hidden..., 2]
  std::vector<Matrix> weights;  // per layer, out x in
  std::vector<std::vector<double>> biases;
};

struct MlpCache {
  std::vector<Matrix> inputs;      // per layer
  std::vector<Matrix> preacts;     // per layer, before ReLU
  std::size_t n_rows = 0;
  std::uintptr_t model_tag = 0;
};

struct MlpLayerGradient {
  Matrix dW;
  std::vector<double> db;
};

struct MlpGradient {
  std::vector<MlpLayerGradient> layers;
};

// Deterministic init. Spline coefficients are N(0, 0.1^2) drawn from a
// stream keyed by (seed, layer, row, col); w_s = 1 and w_b = 1/in_dim so
// that a node's summed silu contributions start inside the knot domain.
KanModel init_kan(const std::vector<int>& widths, int order, int grid,
                  double domain_a, double domain_b, std::uint64_t seed);

Matrix kan_forward(const KanModel& model, const Matrix& batch,
                   KanCache* cache = nullptr);
KanGradient kan_backward(const KanModel& model, const KanCache& cache,
                         const Matrix& dlogits);

// He-normal weights, zero biases.
MlpModel init_mlp(const std::vector<int>& widths, std::uint64_t seed);

Matrix mlp_forward(const MlpModel& model, const Matrix& batch,
                   MlpCache* cache = nullptr);
MlpGradient mlp_backward(const MlpModel& model, const MlpCache& cache,
                         const Matrix& dlogits);

std::size_t parameter_count(const KanModel& model);
std::size_t parameter_count(const MlpModel& model);

// Bytes of trainable state: 8 bytes per scalar times the optimizer
// multiplier (3 for Adam: parameter plus two moments).
std::size_t parameter_memory(const KanModel& model, int state_multiplier = 1);
std::size_t parameter_memory(const MlpModel& model, int state_multiplier = 1);

// Canonical flat parameter order, shared by Adam, checkpoints and the
// finite-difference harness: per layer, per edge (w_b, w_s, coefficients)
// for the KAN; per layer (W row-major, then bias) for the MLP.
std::vector<double> flatten_params(const KanModel& model);
std::vector<double> flatten_params(const MlpModel& model);
void unflatten_params(KanModel& model, std::span<const double> flat);
void unflatten_params(MlpModel& model, std::span<const double> flat);
std::vector<double> flatten_grad(const KanGradient& grad);
std::vector<double> flatten_grad(const MlpGradient& grad);

void save_checkpoint(const KanModel& model, const std::string& path);
void save_checkpoint(const MlpModel& model, const std::string& path);
KanModel load_kan_checkpoint(const std::string& path);
MlpModel load_mlp_checkpoint(const std::string& path);

double silu(double x);
double silu_derivative(double x);

}  // namespace kanbench
