#pragma once

#include <span>
#include <vector>

namespace kanbench {

// Uniform B-spline grid of a given order over [a, b]. Knots extend `order`
// intervals past each domain end so that exactly grid + order basis
// functions have support on [a, b] and partition of unity holds there.
struct KnotVector {
  int order = 0;  // Cox-de Boor order k (polynomial degree k - 1)
  int grid = 0;   // interior intervals G
  double a = 0.0;
  double b = 1.0;
  double h = 0.0;              // uniform knot spacing
  std::vector<double> knots;   // size G + 2k + 1

  int basis_count() const { return grid + order; }
};

// Dense evaluation of all basis functions at one point.
struct BasisEval {
  std::vector<double> values;
  std::vector<double> derivatives;
};

struct SplineValue {
  double value = 0.0;
  double derivative = 0.0;
};

KnotVector make_knots(int order, int grid, double a, double b);

// Windowed Cox-de Boor evaluation at x in [a, b]. Writes the `order`
// possibly-nonzero basis values and derivatives and returns the index of
// the first one. `values` and `derivs` must hold at least `order` doubles.
int eval_basis_window(const KnotVector& kv, double x, double* values,
                      double* derivs);

BasisEval eval_basis(const KnotVector& kv, double x);

SplineValue eval_spline(const KnotVector& kv,
                        std::span<const double> coefficients, double x);

}  // namespace kanbench
