#include "doctest.h"

#include <map>

#include "hodgekit/hodge_core.hpp"
#include "hodgekit/lie_structure.hpp"
#include "hodgekit/sampling.hpp"
#include "support.hpp"

using namespace hodge;
using testing_support::ctx_of;

TEST_CASE("lie algebra residual") {
  const Context ctx = ctx_of(1, {1, 1});
  CHECK(lie::lie_algebra_residual(ctx, Mat::Zero(2, 2)) == 0.0);
  // Q in base coordinates is [[0,-2i],[2i,0]]; every strictly upper X solves
  // X Q + Q X^T = 0.
  Mat qe(2, 2);
  qe << 0, -2.0 * kI, 2.0 * kI, 0;
  CHECK(max_abs(ctx.q_eta() - qe) < 1e-15);
  Mat x = Mat::Zero(2, 2);
  x(0, 1) = cplx(0.7, -1.1);
  CHECK(lie::lie_algebra_residual(ctx, x) < 1e-15);
  CHECK(lie::lie_algebra_residual(ctx, Mat::Identity(2, 2)) ==
        doctest::Approx(2 * max_abs(ctx.q_eta())));
}

TEST_CASE("graded dimensions") {
  const std::map<std::pair<int, int>, std::vector<int>> expected = {
      {{0, 1}, {0}},
      {{1, 2}, {1, 1, 1}},
      {{1, 4}, {3, 4, 3}},
      {{2, 3}, {0, 1, 1, 1, 0}},
      {{2, 4}, {0, 2, 2, 2, 0}},
      {{2, 5}, {1, 2, 4, 2, 1}},
      {{3, 4}, {1, 1, 2, 2, 2, 1, 1}},
  };
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    const int n = s.weight, m = ctx.dim();
    CAPTURE(n);
    CAPTURE(m);
    const auto& want = expected.at({n, m});
    for (int k = -n; k <= n; ++k)
      CHECK(static_cast<int>(ctx.graded_basis(k).size()) == want[k + n]);
    CHECK(ctx.graded_basis(n + 1).empty());
    CHECK(ctx.graded_basis(-n - 1).empty());
    const int dim_g = n % 2 == 0 ? m * (m - 1) / 2 : m * (m + 1) / 2;
    CHECK(lie::algebra_dimension(ctx) == dim_g);
    for (int k = -n; k <= n; ++k)
      for (const auto& b : ctx.graded_basis(k)) {
        CHECK(lie::lie_algebra_residual(ctx, b) < 1e-12);
        CHECK(max_abs(b - lie::grade_component(ctx.hodge(), b, k)) == 0.0);
      }
  }
}

TEST_CASE("bracket closure respects the grading") {
  CounterRng rng(11);
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    const int n = s.weight;
    for (int a = -n; a <= n; ++a)
      for (int b = -n; b <= n; ++b) {
        const Mat x = sampling::graded_element(ctx, a, rng);
        const Mat y = sampling::graded_element(ctx, b, rng);
        const Mat z = lie::bracket(x, y);
        CHECK(lie::lie_algebra_residual(ctx, z) < 1e-10);
        CHECK(max_abs(z - lie::grade_component(ctx.hodge(), z, a + b)) < 1e-12);
      }
  }
}

TEST_CASE("nilpotent exponential closed forms") {
  const HodgeNumbers h1(1, {1, 1});
  CHECK(max_abs(lie::nilpotent_exp(h1, Mat::Zero(2, 2)) - Mat::Identity(2, 2)) == 0.0);
  Mat x = Mat::Zero(2, 2);
  x(0, 1) = cplx(0.3, 2.0);
  Mat want = Mat::Identity(2, 2);
  want(0, 1) = x(0, 1);
  CHECK(max_abs(lie::nilpotent_exp(h1, x) - want) == 0.0);
  CHECK(max_abs(lie::nilpotent_log(h1, want) - x) == 0.0);

  const HodgeNumbers h2(2, {1, 1, 1});
  Mat y = Mat::Zero(3, 3);
  y(0, 1) = cplx(1.5, -0.5);
  y(1, 2) = cplx(-0.25, 2.0);
  const Mat e = lie::nilpotent_exp(h2, y);
  CHECK(std::abs(e(0, 2) - y(0, 1) * y(1, 2) / 2.0) < 1e-15);
  CHECK(std::abs(e(0, 1) - y(0, 1)) == 0.0);

  Mat lower = Mat::Zero(3, 3);
  lower(2, 0) = 1.0;
  CHECK_THROWS_WITH_AS(lie::nilpotent_exp(h2, lower), doctest::Contains("NotNilpotent"), Error);
  CHECK_THROWS_WITH_AS(lie::nilpotent_log(h2, 2.0 * Mat::Identity(3, 3)),
                       doctest::Contains("NotUnipotent"), Error);
}

TEST_CASE("exp and log are mutually inverse") {
  CounterRng rng(5);
  double worst = 0.0;
  for (const auto& s : testing_support::test_shapes()) {
    const HodgeNumbers hn(s.weight, s.h);
    for (int i = 0; i < 200; ++i) {
      const Mat x = sampling::nilpotent(hn, rng, 1.0);
      const Mat u = lie::nilpotent_exp(hn, x);
      worst = std::max(worst, max_abs(lie::nilpotent_log(hn, u) - x));
      worst = std::max(worst, max_abs(lie::nilpotent_exp(hn, lie::nilpotent_log(hn, u)) - u));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("dual exponential derivative matches central differences") {
  const HodgeNumbers hn(3, {1, 1, 1, 1});
  CounterRng rng(9);
  const Mat x = sampling::nilpotent(hn, rng), d = sampling::nilpotent(hn, rng);
  const DualMat e = lie::nilpotent_exp(hn, DualMat{x, d});
  const double h = 1e-6;
  const Mat fd = (lie::nilpotent_exp(hn, x + h * d) - lie::nilpotent_exp(hn, x - h * d)) / (2 * h);
  CHECK(max_abs(e.d - fd) < 1e-8);
  const DualMat l = lie::nilpotent_log(hn, e);
  CHECK(max_abs(l.v - x) < 1e-13);
  CHECK(max_abs(l.d - d) < 1e-12);
}

TEST_CASE("horizontal orbits keep the first relation") {
  CounterRng rng(21);
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    const Mat x = sampling::graded_element(ctx, -1, rng);
    for (double t : {0.1, 0.7, 2.5, 10.0}) {
      const Mat f = lie::nilpotent_exp(ctx.hodge(), cplx(t) * x) * ctx.base();
      CHECK(check_hr1(ctx, f) < 1e-10 * std::max(1.0, t * t * t));
    }
  }
}
