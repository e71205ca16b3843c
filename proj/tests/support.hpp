#pragma once

#include <vector>

#include "hodgekit/hodge_core.hpp"
#include "hodgekit/linalg.hpp"

namespace testing_support {

using hodge::cplx;
using hodge::Mat;

inline hodge::Context ctx_of(int weight, std::vector<int> h) {
  return hodge::build_context(hodge::HodgeNumbers(weight, std::move(h)));
}

struct Shape {
  int weight;
  std::vector<int> h;
};

inline std::vector<Shape> test_shapes() {
  return {{0, {1}},       {1, {1, 1}},    {1, {2, 2}},      {2, {1, 1, 1}},
          {2, {1, 2, 1}}, {2, {2, 1, 2}}, {3, {1, 1, 1, 1}}};
}

/// Weight-1 disc model frame: zeta_0 = eta_0 + w eta_1, zeta_1 = eta_1.
inline Mat disc_frame(const hodge::Context& ctx, cplx w) {
  Mat phi = Mat::Identity(2, 2);
  phi(0, 1) = w;
  return phi * ctx.base();
}

/// Row spans agree iff stacking does not raise the rank.
inline bool same_span(const Mat& a, const Mat& b, double tol = 1e-9) {
  Mat s(a.rows() + b.rows(), a.cols());
  s << a, b;
  const int ra = hodge::linalg::numerical_rank(a, tol);
  const int rb = hodge::linalg::numerical_rank(b, tol);
  const int rs = hodge::linalg::numerical_rank(s, tol);
  return ra == rb && rs == ra;
}

}  // namespace testing_support
