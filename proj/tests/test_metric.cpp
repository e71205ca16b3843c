#include "doctest.h"

#include <cmath>
#include <numbers>

#include "hodgekit/hodge_metric.hpp"
#include "hodgekit/horizontal_dynamics.hpp"
#include "hodgekit/lie_structure.hpp"
#include "hodgekit/quadrature.hpp"
#include "hodgekit/sampling.hpp"
#include "support.hpp"

using namespace hodge;
using testing_support::ctx_of;
using testing_support::disc_frame;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = a + (b - a) * i / n;
  return t;
}

Mat unit_superdiagonal(int m) {
  Mat x = Mat::Zero(m, m);
  for (int i = 0; i + 1 < m; ++i) x(i, i + 1) = 1.0;
  return x;
}

}  // namespace

TEST_CASE("gauss legendre quadrature") {
  const auto scalar = [](auto f) {
    return [f](double t) {
      Eigen::VectorXd v(1);
      v(0) = f(t);
      return v;
    };
  };
  auto r = quad::integrate(scalar([](double t) { return std::pow(t, 15); }), {0.0, 1.0}, 1e-12);
  CHECK(r.value(0) == doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK(r.segments == 1);
  r = quad::integrate(scalar([](double t) { return std::sin(t); }), {0.0, std::numbers::pi}, 1e-10);
  CHECK(r.value(0) == doctest::Approx(2.0).epsilon(1e-12));
  r = quad::integrate(scalar([](double t) { return 1.0 / (1.0 - t * t); }), {0.0, 0.999}, 1e-9);
  CHECK(std::abs(r.value(0) - std::atanh(0.999)) < 1e-8);
  CHECK(r.segments > 1);
  CHECK_THROWS_WITH_AS(
      quad::integrate(scalar([](double t) { return 1.0 / std::sqrt(std::abs(t - 0.3)); }),
                      {0.0, 1.0}, 1e-14, 8, 3),
      doctest::Contains("QuadratureNotConverged"), Error);
  const auto& rule = quad::gauss_legendre(8);
  double s = 0.0;
  for (double w : rule.weights) s += w;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("disc grams and speed") {
  const Context ctx = ctx_of(1, {1, 1});
  for (double r : {0.0, 0.4, 0.8}) {
    const cplx w = std::polar(r, 1.3);
    const GramData g = gram_blocks(ctx, disc_frame(ctx, w));
    const double s = 1.0 - r * r;
    CHECK(g.grams[0](0, 0).real() == doctest::Approx(2 * s).epsilon(1e-12));
    CHECK(g.grams[1](0, 0).real() == doctest::Approx(2 / s).epsilon(1e-12));
    CHECK(g.m_bound == doctest::Approx(std::sqrt(2 * s)).epsilon(1e-12));
    CHECK(g.M_bound == doctest::Approx(std::sqrt(2 / s)).epsilon(1e-12));
    HorizontalTangent v{{Mat::Constant(1, 1, cplx(0.0, 1.0))}};
    const double hs = horizontal_norm(ctx, g, v, NormMode::HilbertSchmidt);
    CHECK(hs == doctest::Approx(1 / s).epsilon(1e-12));
    CHECK(horizontal_norm(ctx, g, v, NormMode::ScalarL1) == doctest::Approx(hs).epsilon(1e-12));
    CHECK(l1_lower_integrand(g, v) == doctest::Approx(hs).epsilon(1e-12));
  }
}

TEST_CASE("grams agree with the hodge form on the decomposition") {
  CounterRng rng(41);
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    const auto& hn = ctx.hodge();
    const Mat x = sampling::graded_element(ctx, -1, rng, 0.4);
    const Mat frame = lie::nilpotent_exp(hn, x) * ctx.base();
    const Mat dec = decomposition_from_filtration(ctx, frame);
    const Mat weil = weil_operator(ctx, dec);
    const GramData g = gram_blocks(ctx, frame);
    for (int a = 0; a <= hn.weight(); ++a) {
      const int o = hn.block_offset(a);
      for (int i = 0; i < hn.block_size(a); ++i)
        for (int j = 0; j < hn.block_size(a); ++j) {
          const cplx want = hodge_form_with(ctx, weil, dec.row(o + i), dec.row(o + j));
          CHECK(std::abs(g.grams[a](i, j) - want) < 1e-10 * (1 + std::abs(want)));
        }
    }
  }
}

TEST_CASE("norm modes and inner product") {
  const Context ctx = ctx_of(1, {2, 2});
  CounterRng rng(8);
  const Mat x = sampling::graded_element(ctx, -1, rng, 0.5);
  const Mat frame = lie::nilpotent_exp(ctx.hodge(), x) * ctx.base();
  const GramData g = gram_blocks(ctx, frame);
  const HorizontalTangent v = superdiagonal(ctx.hodge(), sampling::graded_element(ctx, -1, rng));
  const double hs = horizontal_norm(ctx, g, v, NormMode::HilbertSchmidt);
  CHECK(horizontal_inner(g, v, v).real() == doctest::Approx(hs * hs).epsilon(1e-12));
  CHECK(std::abs(horizontal_inner(g, v, v).imag()) < 1e-12);
  CHECK(l1_lower_integrand(g, v) <= hs * (1 + 1e-12));
  CHECK_THROWS_WITH_AS(horizontal_norm(ctx, g, v, NormMode::ScalarL1),
                       doctest::Contains("NonScalarGram"), Error);
  HorizontalTangent bad{{Mat::Zero(1, 2)}};
  CHECK_THROWS_WITH_AS(horizontal_norm(ctx, g, bad, NormMode::HilbertSchmidt),
                       doctest::Contains("ShapeMismatch"), Error);
  // at the base the grams are scalar and both modes agree
  const GramData g0 = gram_blocks(ctx, ctx.base());
  CHECK(horizontal_norm(ctx, g0, v, NormMode::ScalarL1) ==
        doctest::Approx(horizontal_norm(ctx, g0, v, NormMode::HilbertSchmidt)).epsilon(1e-12));
}

TEST_CASE("disc geodesic lengths") {
  const Context ctx = ctx_of(1, {1, 1});
  const SampledCurve c = one_parameter_orbit(ctx, unit_superdiagonal(2), grid(0.0, 0.9, 16));
  const LengthReport r = curve_lengths(ctx, c);
  CHECK(r.hodge_hs == doctest::Approx(std::atanh(0.9)).epsilon(1e-8));
  CHECK(r.hodge_l1_lowerbound == doctest::Approx(std::atanh(0.9)).epsilon(1e-8));
  CHECK(r.euclidean == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.euclidean_superdiagonal == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.gram_m == doctest::Approx(std::sqrt(2 * 0.19)).epsilon(1e-10));
  CHECK(r.gram_M == doctest::Approx(std::sqrt(2 / 0.19)).epsilon(1e-10));
  CHECK(r.error_estimate < 1e-6);

  // same curve without the dense evaluator
  SampledCurve h = one_parameter_orbit(ctx, unit_superdiagonal(2), grid(0.0, 0.9, 64));
  h.evaluator = nullptr;
  CHECK(curve_lengths(ctx, h).hodge_hs == doctest::Approx(std::atanh(0.9)).epsilon(1e-5));

  const SampledCurve out = one_parameter_orbit(ctx, unit_superdiagonal(2), grid(0.0, 1.2, 12));
  CHECK_THROWS_WITH_AS(curve_lengths(ctx, out), doctest::Contains("SampleOutsideChart"), Error);
}

TEST_CASE("length bounds on weight two and three orbits") {
  CounterRng rng(4);
  for (const auto& s : testing_support::test_shapes()) {
    if (s.weight < 2) continue;
    const Context ctx = ctx_of(s.weight, s.h);
    const Mat x = sampling::graded_element(ctx, -1, rng, 0.6);
    const SampledCurve c = one_parameter_orbit(ctx, x, grid(0.0, 1.0, 16));
    const LengthReport r = curve_lengths(ctx, c);
    CHECK(r.hodge_hs > 0.0);
    // blockwise sums against root-sum-of-squares: Cauchy-Schwarz over n blocks
    const double rn = std::sqrt(static_cast<double>(s.weight));
    CHECK(r.hodge_l1_lowerbound <= rn * r.hodge_hs * (1 + 1e-9));
    CHECK(r.euclidean_superdiagonal <= rn * r.euclidean * (1 + 1e-9));
    double sum = 0.0;
    for (double v : r.superdiagonal_lengths) sum += v;
    CHECK(sum == doctest::Approx(r.euclidean_superdiagonal).epsilon(1e-9));
    // Euclidean superdiagonal speed is constant ||X^{(a,a+1)}||
    double want = 0.0;
    for (const auto& b : superdiagonal(ctx.hodge(), x).v) want += b.norm();
    CHECK(sum == doctest::Approx(want).epsilon(1e-9));
  }
}
