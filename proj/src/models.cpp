#include "kanbench/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "kanbench/dataset.hpp"
#include "kanbench/errors.hpp"
#include "kanbench/rng.hpp"

namespace kanbench {

namespace {

void check_widths(const std::vector<int>& widths) {
  if (widths.size() < 2) throw ShapeError("widths need at least input and output");
  for (int w : widths) {
    if (w < 1) throw ShapeError("every width must be >= 1");
  }
  if (widths.back() != 2) throw ShapeError("final width must be 2 (two logits)");
}

std::uint64_t edge_seed(std::uint64_t seed, std::size_t layer, int row, int col) {
  std::uint64_t h = mix_seed(seed, hash_str("kan-edge"));
  h = mix_seed(h, static_cast<std::uint64_t>(layer));
  h = mix_seed(h, static_cast<std::uint64_t>(row));
  h = mix_seed(h, static_cast<std::uint64_t>(col));
  return h;
}

}  // namespace

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_derivative(double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

KanModel init_kan(const std::vector<int>& widths, int order, int grid,
                  double domain_a, double domain_b, std::uint64_t seed) {
  check_widths(widths);
  KanModel model;
  model.widths = widths;
  model.order = order;
  model.grid = grid;
  model.domain_a = domain_a;
  model.domain_b = domain_b;
  const KnotVector knots = make_knots(order, grid, domain_a, domain_b);
  const int basis = knots.basis_count();

  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    KanLayer layer;
    layer.in_dim = widths[l];
    layer.out_dim = widths[l + 1];
    layer.knots = knots;
    layer.edges.resize(static_cast<std::size_t>(layer.out_dim) * layer.in_dim);
    for (int j = 0; j < layer.out_dim; ++j) {
      for (int i = 0; i < layer.in_dim; ++i) {
        EdgeFunction& e = layer.edge(j, i);
        // Scaled so a node's summed silu responses spread across the knot
        // domain without saturating the next layer's clamp, and so the
        // silu path dominates the spline noise at the start.
        e.w_b = 2.0 / layer.in_dim;
        e.w_s = 1.0;
        e.coefficients.resize(static_cast<std::size_t>(basis));
        Rng rng(edge_seed(seed, l, j, i));
        for (double& c : e.coefficients) c = rng.normal(0.0, 0.03);
      }
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

namespace {

// In-place matrix resize that reuses the backing storage.
void reshape(Matrix& m, std::size_t rows, std::size_t cols) {
  if (m.rows() != rows || m.cols() != cols) m = Matrix(rows, cols);
}

}  // namespace

Matrix kan_forward(const KanModel& model, const Matrix& batch,
                   KanCache* cache) {
  if (batch.cols() != static_cast<std::size_t>(model.widths.front())) {
    throw ShapeError("batch column count does not match model input width");
  }
  const std::size_t n = batch.rows();
  if (cache) {
    cache->layers.resize(model.layers.size());
    cache->n_rows = n;
    cache->model_tag = reinterpret_cast<std::uintptr_t>(&model);
  }

  const double lo = model.domain_a;
  const double hi = model.domain_b;
  // Reused across calls when the caller keeps the cache object alive.
  KanLayerCache scratch;
  Matrix current = batch;
  std::vector<std::uint8_t> open(n * batch.cols(), 1);

  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const KanLayer& layer = model.layers[l];
    const int in = layer.in_dim;
    const int out = layer.out_dim;
    const int k = layer.knots.order;
    if (current.cols() != static_cast<std::size_t>(in)) {
      throw ShapeError("layer input width mismatch");
    }

    KanLayerCache* lc = cache ? &cache->layers[l] : nullptr;
    // Inputs are clamped into the knot domain; the first layer is expected
    // to be pre-scaled but is clamped identically for safety.
    Matrix& clamped = lc ? lc->input : scratch.input;
    reshape(clamped, n, static_cast<std::size_t>(in));
    for (std::size_t r = 0; r < n; ++r) {
      for (int i = 0; i < in; ++i) {
        clamped(r, i) = std::clamp(current(r, i), lo, hi);
      }
    }
    if (lc) {
      lc->open = open;
      lc->basis_vals.resize(n * in * k);
      lc->basis_ders.resize(n * in * k);
      lc->basis_first.resize(n * in);
      lc->silu_val.resize(n * in);
      lc->silu_der.resize(n * in);
    }

    Matrix next(n, static_cast<std::size_t>(out), 0.0);
    double vals[16];
    double ders[16];
    for (std::size_t r = 0; r < n; ++r) {
      for (int i = 0; i < in; ++i) {
        const double x = clamped(r, i);
        // Every edge function evaluates itself: phi(x) = w_b silu(x) +
        // w_s spline(x), the edge being the unit of the model.
        for (int j = 0; j < out; ++j) {
          const EdgeFunction& e = layer.edge(j, i);
          const int first = eval_basis_window(layer.knots, x, vals, ders);
          const double sv = silu(x);
          double spline_val = 0.0;
          for (int q = 0; q < k; ++q) {
            spline_val += e.coefficients[static_cast<std::size_t>(first + q)] * vals[q];
          }
          next(r, j) += e.w_b * sv + e.w_s * spline_val;
          if (lc && j == 0) {
            const std::size_t at = (r * in + i);
            lc->basis_first[at] = first;
            lc->silu_val[at] = sv;
            lc->silu_der[at] = silu_derivative(x);
            for (int q = 0; q < k; ++q) {
              lc->basis_vals[at * k + q] = vals[q];
              lc->basis_ders[at * k + q] = ders[q];
            }
          }
        }
      }
    }

    // Saturation mask for the clamp that will produce the next layer input.
    if (l + 1 < model.layers.size()) {
      open.assign(n * static_cast<std::size_t>(out), 1);
      for (std::size_t r = 0; r < n; ++r) {
        for (int j = 0; j < out; ++j) {
          const double y = next(r, j);
          if (y < lo || y > hi) open[r * out + j] = 0;
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

KanGradient kan_backward(const KanModel& model, const KanCache& cache,
                         const Matrix& dlogits) {
  if (cache.model_tag != reinterpret_cast<std::uintptr_t>(&model) ||
      cache.layers.size() != model.layers.size()) {
    throw CacheError("cache does not belong to this model");
  }
  if (dlogits.rows() != cache.n_rows || dlogits.cols() != 2) {
    throw CacheError("dlogits shape does not match the cached forward pass");
  }

  const std::size_t n = cache.n_rows;
  KanGradient grad;
  grad.layers.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const KanLayer& layer = model.layers[l];
    auto& g = grad.layers[l];
    const std::size_t edges = static_cast<std::size_t>(layer.out_dim) * layer.in_dim;
    g.dw_b.assign(edges, 0.0);
    g.dw_s.assign(edges, 0.0);
    g.dcoef.assign(edges * layer.knots.basis_count(), 0.0);
  }

  Matrix dout = dlogits;
  for (std::size_t li = model.layers.size(); li-- > 0;) {
    const KanLayer& layer = model.layers[li];
    const KanLayerCache& lc = cache.layers[li];
    KanLayerGradient& g = grad.layers[li];
    const int in = layer.in_dim;
    const int out = layer.out_dim;
    const int k = layer.knots.order;
    const int basis = layer.knots.basis_count();

    Matrix din(n, static_cast<std::size_t>(in), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (int i = 0; i < in; ++i) {
        const std::size_t at = r * in + i;
        const double sv = lc.silu_val[at];
        const double sd = lc.silu_der[at];
        const int first = lc.basis_first[at];
        const double* bv = &lc.basis_vals[at * k];
        const double* bd = &lc.basis_ders[at * k];
        double dx = 0.0;
        for (int j = 0; j < out; ++j) {
          const double gy = dout(r, j);
          if (gy == 0.0) continue;
          const EdgeFunction& e = layer.edge(j, i);
          const std::size_t eidx = static_cast<std::size_t>(j) * in + i;
          double spline_val = 0.0;
          double spline_der = 0.0;
          double* dc = &g.dcoef[eidx * basis];
          for (int q = 0; q < k; ++q) {
            const double c = e.coefficients[static_cast<std::size_t>(first + q)];
            spline_val += c * bv[q];
            spline_der += c * bd[q];
            dc[first + q] += gy * e.w_s * bv[q];
          }
          g.dw_b[eidx] += gy * sv;
          g.dw_s[eidx] += gy * spline_val;
          dx += gy * (e.w_b * sd + e.w_s * spline_der);
        }
        din(r, i) = lc.open[at] ? dx : 0.0;
      }
    }
    dout = std::move(din);
  }
  return grad;
}

MlpModel init_mlp(const std::vector<int>& widths, std::uint64_t seed) {
  check_widths(widths);
  MlpModel model;
  model.widths = widths;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    Matrix w(static_cast<std::size_t>(out), static_cast<std::size_t>(in));
    Rng rng(mix_seed(mix_seed(seed, hash_str("mlp-layer")), l));
    const double sd = std::sqrt(2.0 / in);
    for (int j = 0; j < out; ++j) {
      for (int i = 0; i < in; ++i) w(j, i) = rng.normal(0.0, sd);
    }
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(static_cast<std::size_t>(out), 0.0);
  }
  return model;
}

Matrix mlp_forward(const MlpModel& model, const Matrix& batch, MlpCache* cache) {
  if (batch.cols() != static_cast<std::size_t>(model.widths.front())) {
    throw ShapeError("batch column count does not match model input width");
  }
  const std::size_t n = batch.rows();
  if (cache) {
    cache->inputs.resize(model.weights.size());
    cache->preacts.resize(model.weights.size());
    cache->n_rows = n;
    cache->model_tag = reinterpret_cast<std::uintptr_t>(&model);
  }
  Matrix current = batch;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const Matrix& w = model.weights[l];
    const auto& b = model.biases[l];
    const std::size_t out = w.rows();
    const std::size_t in = w.cols();
    Matrix z(n, out);
    for (std::size_t r = 0; r < n; ++r) {
      const double* x = current.row(r).data();
      for (std::size_t j = 0; j < out; ++j) {
        const double* wj = w.row(j).data();
        double acc = b[j];
        for (std::size_t i = 0; i < in; ++i) acc += wj[i] * x[i];
        z(r, j) = acc;
      }
    }
    if (cache) {
      cache->inputs[l] = current;
      cache->preacts[l] = z;
    }
    const bool last = l + 1 == model.weights.size();
    if (!last) {
      for (double& v : z.data()) v = v > 0.0 ? v : 0.0;  // ReLU
    }
    current = std::move(z);
  }
  return current;
}

MlpGradient mlp_backward(const MlpModel& model, const MlpCache& cache,
                         const Matrix& dlogits) {
  if (cache.model_tag != reinterpret_cast<std::uintptr_t>(&model) ||
      cache.inputs.size() != model.weights.size()) {
    throw CacheError("cache does not belong to this model");
  }
  if (dlogits.rows() != cache.n_rows || dlogits.cols() != 2) {
    throw CacheError("dlogits shape does not match the cached forward pass");
  }
  const std::size_t n = cache.n_rows;
  MlpGradient grad;
  grad.layers.resize(model.weights.size());

  Matrix dout = dlogits;
  for (std::size_t li = model.weights.size(); li-- > 0;) {
    const Matrix& w = model.weights[li];
    const Matrix& input = cache.inputs[li];
    const std::size_t out = w.rows();
    const std::size_t in = w.cols();
    auto& g = grad.layers[li];
    g.dW = Matrix(out, in, 0.0);
    g.db.assign(out, 0.0);

    Matrix din(n, in, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < out; ++j) {
        const double gy = dout(r, j);
        if (gy == 0.0) continue;
        g.db[j] += gy;
        for (std::size_t i = 0; i < in; ++i) {
          g.dW(j, i) += gy * input(r, i);
          din(r, i) += gy * w(j, i);
        }
      }
    }
    if (li > 0) {
      const Matrix& pre = cache.preacts[li - 1];
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < in; ++i) {
          if (pre(r, i) <= 0.0) din(r, i) = 0.0;
        }
      }
    }
    dout = std::move(din);
  }
  return grad;
}

std::size_t parameter_count(const KanModel& model) {
  std::size_t count = 0;
  for (const KanLayer& layer : model.layers) {
    for (const EdgeFunction& e : layer.edges) {
      count += 2 + e.coefficients.size();
    }
  }
  return count;
}

std::size_t parameter_count(const MlpModel& model) {
  std::size_t count = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    count += model.weights[l].rows() * model.weights[l].cols() +
             model.biases[l].size();
  }
  return count;
}

std::size_t parameter_memory(const KanModel& model, int state_multiplier) {
  return parameter_count(model) * sizeof(double) * state_multiplier;
}

std::size_t parameter_memory(const MlpModel& model, int state_multiplier) {
  return parameter_count(model) * sizeof(double) * state_multiplier;
}

std::vector<double> flatten_params(const KanModel& model) {
  std::vector<double> flat;
  flat.reserve(parameter_count(model));
  for (const KanLayer& layer : model.layers) {
    for (const EdgeFunction& e : layer.edges) {
      flat.push_back(e.w_b);
      flat.push_back(e.w_s);
      flat.insert(flat.end(), e.coefficients.begin(), e.coefficients.end());
    }
  }
  return flat;
}

std::vector<double> flatten_params(const MlpModel& model) {
  std::vector<double> flat;
  flat.reserve(parameter_count(model));
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    const auto& d = model.weights[l].data();
    flat.insert(flat.end(), d.begin(), d.end());
    flat.insert(flat.end(), model.biases[l].begin(), model.biases[l].end());
  }
  return flat;
}

void unflatten_params(KanModel& model, std::span<const double> flat) {
  if (flat.size() != parameter_count(model)) {
    throw ShapeError("flat parameter size mismatch");
  }
  std::size_t at = 0;
  for (KanLayer& layer : model.layers) {
    for (EdgeFunction& e : layer.edges) {
      e.w_b = flat[at++];
      e.w_s = flat[at++];
      for (double& c : e.coefficients) c = flat[at++];
    }
  }
}

void unflatten_params(MlpModel& model, std::span<const double> flat) {
  if (flat.size() != parameter_count(model)) {
    throw ShapeError("flat parameter size mismatch");
  }
  std::size_t at = 0;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    for (double& v : model.weights[l].data()) v = flat[at++];
    for (double& v : model.biases[l]) v = flat[at++];
  }
}

std::vector<double> flatten_grad(const KanGradient& grad) {
  std::vector<double> flat;
  for (const KanLayerGradient& g : grad.layers) {
    const std::size_t edges = g.dw_b.size();
    const std::size_t basis = edges == 0 ? 0 : g.dcoef.size() / edges;
    for (std::size_t e = 0; e < edges; ++e) {
      flat.push_back(g.dw_b[e]);
      flat.push_back(g.dw_s[e]);
      for (std::size_t q = 0; q < basis; ++q) flat.push_back(g.dcoef[e * basis + q]);
    }
  }
  return flat;
}

std::vector<double> flatten_grad(const MlpGradient& grad) {
  std::vector<double> flat;
  for (const MlpLayerGradient& g : grad.layers) {
    flat.insert(flat.end(), g.dW.data().begin(), g.dW.data().end());
    flat.insert(flat.end(), g.db.begin(), g.db.end());
  }
  return flat;
}

namespace {

nlohmann::json params_json(const std::vector<double>& flat) {
  return nlohmann::json(flat);
}

void write_json_file(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << doc.dump(2) << "\n";
}

nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
}

}  // namespace

void save_checkpoint(const KanModel& model, const std::string& path) {
  nlohmann::json doc;
  doc["type"] = "kan";
  doc["widths"] = model.widths;
  doc["order"] = model.order;
  doc["grid"] = model.grid;
  doc["domain"] = {model.domain_a, model.domain_b};
  doc["parameters"] = params_json(flatten_params(model));
  write_json_file(doc, path);
}

void save_checkpoint(const MlpModel& model, const std::string& path) {
  nlohmann::json doc;
  doc["type"] = "mlp";
  doc["widths"] = model.widths;
  doc["parameters"] = params_json(flatten_params(model));
  write_json_file(doc, path);
}

KanModel load_kan_checkpoint(const std::string& path) {
  const nlohmann::json doc = read_json_file(path);
  if (doc.value("type", "") != "kan") throw ParseError("not a kan checkpoint");
  KanModel model = init_kan(doc.at("widths").get<std::vector<int>>(),
                            doc.at("order").get<int>(), doc.at("grid").get<int>(),
                            doc.at("domain")[0].get<double>(),
                            doc.at("domain")[1].get<double>(), 0);
  unflatten_params(model, doc.at("parameters").get<std::vector<double>>());
  return model;
}

MlpModel load_mlp_checkpoint(const std::string& path) {
  const nlohmann::json doc = read_json_file(path);
  if (doc.value("type", "") != "mlp") throw ParseError("not an mlp checkpoint");
  MlpModel model = init_mlp(doc.at("widths").get<std::vector<int>>(), 0);
  unflatten_params(model, doc.at("parameters").get<std::vector<double>>());
  return model;
}

}  // namespace kanbench
