#include "kanbench/spline.hpp"

#include <algorithm>
#include <cmath>

#include "kanbench/errors.hpp"

namespace kanbench {

KnotVector make_knots(int order, int grid, double a, double b) {
  if (order < 1) throw DomainError("spline order must be >= 1");
  if (order > 12) throw DomainError("spline order above supported maximum 12");
  if (grid < 1) throw DomainError("grid interval count must be >= 1");
  if (!(a < b)) throw DomainError("empty spline domain: a must be < b");

  KnotVector kv;
  kv.order = order;
  kv.grid = grid;
  kv.a = a;
  kv.b = b;
  kv.h = (b - a) / grid;
  kv.knots.resize(static_cast<std::size_t>(grid + 2 * order + 1));
  for (int i = 0; i <= grid + 2 * order; ++i) {
    kv.knots[static_cast<std::size_t>(i)] = a + (i - order) * kv.h;
  }
  return kv;
}

int eval_basis_window(const KnotVector& kv, double x, double* values,
                      double* derivs) {
  const int k = kv.order;
  const auto& t = kv.knots;

  // Interval index: x lies in [t[j], t[j+1]); x == b belongs to the last
  // interior interval so that partition of unity holds on the closed domain.
  // Exposed basis r corresponds to the knot-basis starting at t[r + 1]; the
  // G + k exposed bases are exactly the ones whose support reaches [a, b].
  int cell = static_cast<int>(std::floor((x - kv.a) / kv.h));
  cell = std::clamp(cell, 0, kv.grid - 1);
  const int j = cell + k;

  // de Boor triangle. After the order-q pass, values[r] = B_{j-q+1+r, q}(x).
  values[0] = 1.0;
  double lower[16];  // order-(k-1) row, needed for the derivative recurrence
  if (k == 1) {
    derivs[0] = 0.0;
    return j - k;
  }
  for (int q = 2; q <= k; ++q) {
    if (q == k) {
      for (int r = 0; r < q - 1; ++r) lower[r] = values[r];
    }
    double prev = 0.0;  // carries the term flowing into the next entry
    for (int r = 0; r < q; ++r) {
      const int m = j - q + 1 + r;
      const double old_val = (r < q - 1) ? values[r] : 0.0;  // B_{m+1, q-1}
      double v = prev;
      if (r < q - 1) {
        const double right = (t[m + q] - x) / (t[m + q] - t[m + 1]);
        v += right * old_val;
        prev = (x - t[m + 1]) / (t[m + q] - t[m + 1]) * old_val;
      }
      values[r] = v;
    }
  }
  // dB_{m,k} = (k-1) * [B_{m,k-1}/(t[m+k-1]-t[m]) - B_{m+1,k-1}/(t[m+k]-t[m+1])]
  for (int r = 0; r < k; ++r) {
    const int m = j - k + 1 + r;
    const double left = (r > 0) ? lower[r - 1] / (t[m + k - 1] - t[m]) : 0.0;
    const double right = (r < k - 1) ? lower[r] / (t[m + k] - t[m + 1]) : 0.0;
    derivs[r] = (k - 1) * (left - right);
  }
  return j - k;
}

BasisEval eval_basis(const KnotVector& kv, double x) {
  BasisEval out;
  out.values.assign(static_cast<std::size_t>(kv.basis_count()), 0.0);
  out.derivatives.assign(static_cast<std::size_t>(kv.basis_count()), 0.0);
  double vals[16];
  double ders[16];
  const int first = eval_basis_window(kv, x, vals, ders);
  for (int r = 0; r < kv.order; ++r) {
    out.values[static_cast<std::size_t>(first + r)] = vals[r];
    out.derivatives[static_cast<std::size_t>(first + r)] = ders[r];
  }
  return out;
}

SplineValue eval_spline(const KnotVector& kv,
                        std::span<const double> coefficients, double x) {
  if (static_cast<int>(coefficients.size()) != kv.basis_count()) {
    throw ShapeError("coefficient count " +
                     std::to_string(coefficients.size()) +
                     " does not match basis count " +
                     std::to_string(kv.basis_count()));
  }
  double vals[16];
  double ders[16];
  const int first = eval_basis_window(kv, x, vals, ders);
  SplineValue out;
  for (int r = 0; r < kv.order; ++r) {
    const double c = coefficients[static_cast<std::size_t>(first + r)];
    out.value += c * vals[r];
    out.derivative += c * ders[r];
  }
  return out;
}

}  // namespace kanbench
