#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle/auc_oracle.hpp"
#include "oracle/bspline_oracle.hpp"
#include "oracle/grad_oracle.hpp"
#include "oracle/wilcoxon_oracle.hpp"

// Sanity checks of the reference implementations themselves.

TEST_CASE("rational b-spline oracle: indicators and exact partition of unity") {
  using oracle::Rational;

  const auto k1 = oracle::oracle_bspline(1, 4, 0, 1, Rational(3, 8));
  int ones = 0;
  for (const auto& v : k1) {
    if (v == 1) ++ones;
    CHECK((v == 0 || v == 1));
  }
  CHECK(ones == 1);
  CHECK(k1[1] == 1);  // 3/8 lies in [1/4, 2/4)

  for (int k : {1, 2, 3}) {
    for (int G : {3, 5}) {
      for (int num = 0; num <= 12; ++num) {
        const auto vals = oracle::oracle_bspline(k, G, 0, 1, Rational(num, 12));
        Rational sum = 0;
        for (const auto& v : vals) {
          sum += v;
          CHECK(v >= 0);
        }
        CHECK(sum == 1);  // exact in rational arithmetic
      }
    }
  }

  // Frozen exact values for order 3, grid 5 at x = 1/2: the three active
  // quadratic bases at the cell midpoint are (1/8, 3/4, 1/8).
  const auto mid = oracle::oracle_bspline(3, 5, 0, 1, Rational(1, 2));
  CHECK(mid[2] == Rational(1, 8));
  CHECK(mid[3] == Rational(3, 4));
  CHECK(mid[4] == Rational(1, 8));
}

TEST_CASE("pairwise auc oracle basics") {
  const std::vector<int> y = {1, 1, 0, 0};
  CHECK(oracle::oracle_auc(y, std::vector<double>{5, 4, 3, 2}) == 1.0);
  CHECK(oracle::oracle_auc(y, std::vector<double>{1, 1, 1, 1}) == 0.5);
  CHECK(oracle::oracle_auc(std::vector<int>{1, 0, 1, 0},
                           std::vector<double>{0.9, 0.8, 0.4, 0.3}) == 0.75);
}

TEST_CASE("wilcoxon enumeration oracle basics") {
  std::vector<double> all_pos;
  for (int i = 1; i <= 10; ++i) all_pos.push_back(i);
  const auto r = oracle::oracle_wilcoxon(all_pos);
  CHECK(r.w == 0.0);
  CHECK(r.p == doctest::Approx(2.0 / 1024.0).epsilon(1e-12));

  // A single nonzero difference: both signs are equally extreme.
  const auto single = oracle::oracle_wilcoxon(std::vector<double>{0.0, 0.0, 1.5});
  CHECK(single.n == 1);
  CHECK(single.p == doctest::Approx(1.0));
}

TEST_CASE("finite-difference oracle is second order") {
  auto quadratic = [](const std::vector<double>& p) {
    return 3.0 * p[0] * p[0] - 2.0 * p[0] * p[1] + 0.5 * p[1] * p[1] + 4.0 * p[1];
  };
  const std::vector<double> at = {1.25, -0.75};
  const auto grad = oracle::oracle_grad(quadratic, at, 1e-5);
  CHECK(grad[0] == doctest::Approx(6.0 * at[0] - 2.0 * at[1]).epsilon(1e-9));
  CHECK(grad[1] == doctest::Approx(-2.0 * at[0] + at[1] + 4.0).epsilon(1e-9));
}
