#include "doctest.h"

#include <cmath>

#include "hodgekit/hodge_core.hpp"
#include "hodgekit/lie_structure.hpp"
#include "hodgekit/rng.hpp"
#include "hodgekit/sampling.hpp"
#include "support.hpp"

using namespace hodge;
using testing_support::ctx_of;
using testing_support::disc_frame;
using testing_support::same_span;

TEST_CASE("hodge numbers derive f and reject bad shapes") {
  HodgeNumbers hn(2, {1, 2, 1});
  CHECK(hn.dim() == 4);
  CHECK(hn.f(3) == 0);
  CHECK(hn.f(2) == 1);
  CHECK(hn.f(1) == 3);
  CHECK(hn.f(0) == 4);
  CHECK(hn.block_offset(1) == 1);
  CHECK_THROWS_AS(HodgeNumbers(1, {1, 2}), Error);
  CHECK_THROWS_AS(HodgeNumbers(2, {1, 1}), Error);
  CHECK_THROWS_AS(HodgeNumbers(1, {0, 0}), Error);
}

TEST_CASE("canonical weight-1 context") {
  const Context ctx = ctx_of(1, {1, 1});
  Mat q(2, 2);
  q << 0, -1, 1, 0;
  CHECK(max_abs(ctx.q() - q) == 0.0);
  CHECK(ctx.base()(0, 0) == kI);
  CHECK(ctx.base()(0, 1) == cplx(1.0));
  CHECK(ctx.base()(1, 0) == -kI);
  CHECK(ctx.base()(1, 1) == cplx(1.0));
  const RowVec e0 = ctx.base().row(0);
  CHECK(std::abs(kI * ctx.polarization()(e0, e0.conjugate()) - 2.0) < 1e-15);
}

TEST_CASE("flipped polarization violates the second relation with margin -2") {
  const HodgeNumbers hn(1, {1, 1});
  Mat q(2, 2);
  q << 0, 1, -1, 0;
  Mat base(2, 2);
  base << kI, 1, -kI, 1;
  try {
    build_context(hn, q, base);
    FAIL("expected HodgeRiemannViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::HodgeRiemannViolation);
    CHECK(e.index() == 0);
    CHECK(e.value() == doctest::Approx(-2.0).epsilon(1e-12));
  }
}

TEST_CASE("context construction errors") {
  const HodgeNumbers hn(1, {1, 1});
  Mat sym(2, 2);
  sym << 0, 1, 1, 0;
  CHECK_THROWS_WITH_AS(build_context(hn, sym), doctest::Contains("SymmetryMismatch"), Error);
  Mat singular(2, 2);
  singular << kI, 1, kI, 1;
  CHECK_THROWS_WITH_AS(build_context(hn, std::nullopt, singular), doctest::Contains("Singular"),
                       Error);
  Mat unreal(2, 2);
  unreal << kI, 1, kI, 2;
  CHECK_THROWS_WITH_AS(build_context(hn, std::nullopt, unreal),
                       doctest::Contains("RealityViolation"), Error);
}

TEST_CASE("weight 0 is one dimensional") {
  const Context ctx = ctx_of(0, {1});
  CHECK(ctx.dim() == 1);
  CHECK(ctx.q()(0, 0) == cplx(1.0));
  CHECK(check_hr2(ctx, ctx.base()) == doctest::Approx(1.0));
}

TEST_CASE("every test context satisfies both relations at its base") {
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    CAPTURE(s.weight);
    CHECK(check_hr1(ctx, ctx.base()) < 1e-12);
    CHECK(check_hr2(ctx, ctx.base()) > 0.0);
    CHECK(reality_residual(ctx, ctx.base()) == 0.0);
  }
}

TEST_CASE("first relation residual") {
  const Context c1 = ctx_of(1, {1, 1});
  CHECK(check_hr1(c1, Mat::Identity(2, 2)) == 0.0);

  // Perturb zeta_0 towards conj(eta_0): only Q(zeta_0, zeta_0) = -4 eps appears.
  const Context c2 = ctx_of(2, {1, 1, 1});
  const double eps = 1e-3;
  Mat f = c2.base();
  f.row(0) += eps * c2.base().row(2);
  CHECK(check_hr1(c2, f) == doctest::Approx(4 * eps).epsilon(1e-12));
}

TEST_CASE("disc model second relation margin") {
  const Context ctx = ctx_of(1, {1, 1});
  for (double r : {0.0, 0.3, 0.5, 0.9}) {
    const cplx w = std::polar(r, 0.7);
    CHECK(check_hr2(ctx, disc_frame(ctx, w)) == doctest::Approx(2 * (1 - r * r)).epsilon(1e-12));
  }
  CHECK(check_hr2(ctx, disc_frame(ctx, 2.0)) == doctest::Approx(-6.0).epsilon(1e-12));
  CHECK_THROWS_WITH_AS(check_hr2(ctx, disc_frame(ctx, std::polar(1.0, 0.3))),
                       doctest::Contains("DegenerateIntersection"), Error);
}

TEST_CASE("decomposition of the disc point") {
  const Context ctx = ctx_of(1, {1, 1});
  const cplx w(0.3, 0.4);  // |w| = 0.5
  const Mat f = disc_frame(ctx, w);
  const Mat dec = decomposition_from_filtration(ctx, f);
  // block 0 is zeta_0 itself, block 1 is b conj(zeta_0) with b = 1/(1-|w|^2)
  CHECK(max_abs(dec.row(0) - f.row(0)) < 1e-12);
  const double b = 1.0 / (1.0 - std::norm(w));
  CHECK(max_abs(dec.row(1) - b * f.row(0).conjugate()) < 1e-12);
  CHECK(!same_span(dec.row(1), ctx.base().row(1)));
}

TEST_CASE("decomposition of the base and idempotence") {
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    const auto& hn = ctx.hodge();
    const Mat dec = decomposition_from_filtration(ctx, ctx.base());
    CounterRng rng(7, static_cast<std::uint64_t>(s.weight * 10 + hn.dim()));
    const Mat x = sampling::graded_element(ctx, -1, rng, 0.2);
    const Mat f = lie::nilpotent_exp(hn, x) * ctx.base();
    const Mat d1 = decomposition_from_filtration(ctx, f);
    const Mat d2 = decomposition_from_filtration(ctx, d1);
    for (int a = 0; a <= hn.weight(); ++a) {
      CHECK(same_span(row_block(dec, hn, a), row_block(ctx.base(), hn, a)));
      CHECK(same_span(row_block(d1, hn, a), row_block(d2, hn, a)));
      // leading spans reproduce the filtration
      CHECK(same_span(leading_rows(d1, hn, a), leading_rows(f, hn, a)));
    }
  }
}

TEST_CASE("Weil operator") {
  const Context ctx = ctx_of(1, {1, 1});
  const Mat c = weil_operator(ctx, ctx.base());
  CHECK(max_abs(ctx.base().row(0) * c - kI * ctx.base().row(0)) < 1e-15);
  CHECK(max_abs(ctx.base().row(1) * c + kI * ctx.base().row(1)) < 1e-15);
  CHECK(max_abs(c * c + Mat::Identity(2, 2)) < 1e-15);

  const Mat dec = decomposition_from_filtration(ctx, disc_frame(ctx, 0.5));
  const Mat cw = weil_operator(ctx, dec);
  CHECK(max_abs(cw * cw + Mat::Identity(2, 2)) < 1e-12);
  CHECK(max_abs(Mat(cw.imag().cast<cplx>())) < 1e-12);

  const Context c2 = ctx_of(2, {1, 2, 1});
  const Mat w2 = weil_operator(c2, c2.base());
  CHECK(max_abs(w2 * w2 - Mat::Identity(4, 4)) < 1e-14);
}

TEST_CASE("hodge form") {
  const Context ctx = ctx_of(1, {1, 1});
  const RowVec e0 = ctx.base().row(0), e1 = ctx.base().row(1);
  CHECK(std::abs(hodge_form(ctx, ctx.base(), e0, e0) - 2.0) < 1e-14);
  CHECK(std::abs(hodge_form(ctx, ctx.base(), e0, e1)) < 1e-14);
  CHECK(std::abs(hodge_form(ctx, ctx.base(), RowVec::Zero(2), e1)) == 0.0);

  CounterRng rng(3);
  for (const auto& s : testing_support::test_shapes()) {
    const Context c = ctx_of(s.weight, s.h);
    const auto& hn = c.hodge();
    const Mat x = sampling::graded_element(c, -1, rng, 0.3);
    const Mat dec = decomposition_from_filtration(c, lie::nilpotent_exp(hn, x) * c.base());
    const Mat weil = weil_operator(c, dec);
    const Mat u = sampling::gaussian(1, hn.dim(), rng), v = sampling::gaussian(1, hn.dim(), rng);
    CHECK(std::abs(hodge_form_with(c, weil, u, v) - std::conj(hodge_form_with(c, weil, v, u))) <
          1e-12);
    for (int a = 0; a <= hn.weight(); ++a)
      for (int b = 0; b <= hn.weight(); ++b) {
        if (a == b) continue;
        for (int i = 0; i < hn.block_size(a); ++i)
          for (int j = 0; j < hn.block_size(b); ++j) {
            const cplx g = hodge_form_with(c, weil, dec.row(hn.block_offset(a) + i),
                                           dec.row(hn.block_offset(b) + j));
            CHECK(std::abs(g) < 1e-10);
          }
      }
  }
}
