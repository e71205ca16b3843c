#include "doctest.h"

#include "hodgekit/kernels.hpp"
#include "hodgekit/lie_structure.hpp"
#include "hodgekit/nplus_chart.hpp"
#include "hodgekit/sampling.hpp"
#include "support.hpp"

using namespace hodge;
using testing_support::ctx_of;
using testing_support::disc_frame;

TEST_CASE("block factorization of a 2x2 example") {
  const Context ctx = ctx_of(1, {1, 1});
  Mat a(2, 2);
  a << 2, 3, 1, 1;
  const BlockLu f = block_lu(ctx, a);
  REQUIRE(f.ok);
  Mat lower(2, 2), unip(2, 2);
  lower << 2, 0, 1, -0.5;
  unip << 1, 1.5, 0, 1;
  CHECK(max_abs(f.lower - lower) < 1e-15);
  CHECK(max_abs(f.unipotent - unip) < 1e-15);
  CHECK(max_abs(f.lower * f.unipotent - a) < 1e-15);

  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  const BlockLu g = block_lu(ctx, swap);
  CHECK_FALSE(g.ok);
  CHECK(g.failed_block == 0);
}

TEST_CASE("leading minor margins") {
  const HodgeNumbers hn(2, {1, 2, 1});
  for (double v : leading_minor_margins(hn, Mat::Identity(4, 4))) CHECK(v == doctest::Approx(1.0));
  Mat a = Mat::Identity(4, 4);
  a(1, 1) = a(2, 2) = 0.0;
  a(1, 2) = a(2, 1) = 1.0;
  // the 3x3 leading block is a permutation; only the swap inside block 1
  // matters for the determinant, not for N_+
  const auto m = leading_minor_margins(hn, a);
  CHECK(m[1] == doctest::Approx(1.0));
  Mat b = Mat::Identity(4, 4);
  b(0, 0) = 0.0;
  b(0, 3) = 1.0;
  b(3, 3) = 0.0;
  b(3, 0) = 1.0;
  const auto mb = leading_minor_margins(hn, b);
  CHECK(mb[0] == 0.0);
  CHECK(mb[1] == 0.0);
  CHECK(mb[2] == doctest::Approx(1.0));
}

TEST_CASE("disc chart coordinates") {
  const Context ctx = ctx_of(1, {1, 1});
  for (cplx w : {cplx(0.0), cplx(0.3, -0.2), cplx(5.0, 1.0)}) {
    const NPlusCoords c = nplus_coords(ctx, disc_frame(ctx, w));
    Mat want = Mat::Identity(2, 2);
    want(0, 1) = w;
    CHECK(max_abs(c.phi - want) < 1e-14);
    const MembershipReport r = membership(ctx, disc_frame(ctx, w));
    CHECK(r.in_nplus);
    CHECK(r.in_D == (std::abs(w) < 1.0));
  }
  // the conjugate point F^1 = span(eta_1)
  Mat flipped(2, 2);
  flipped << ctx.base().row(1), ctx.base().row(0);
  const MembershipReport r = membership(ctx, flipped);
  CHECK_FALSE(r.in_nplus);
  CHECK_FALSE(r.in_D);
  try {
    nplus_coords(ctx, flipped);
    FAIL("expected NotInNPlus");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInNPlus);
    CHECK(e.index() == 0);
  }
}

TEST_CASE("chart coordinates are unique and basis independent") {
  for (const auto& s : testing_support::test_shapes()) {
    const Context ctx = ctx_of(s.weight, s.h);
    const auto& hn = ctx.hodge();
    CounterRng rng(31, static_cast<std::uint64_t>(hn.dim()));
    for (int i = 0; i < 50; ++i) {
      const Mat frame = sampling::gaussian(hn.dim(), hn.dim(), rng) * ctx.base();
      const NPlusCoords c = nplus_coords(ctx, frame);
      const NPlusCoords m = nplus_coords_by_minors(ctx, frame);
      CHECK(max_abs(c.phi - m.phi) < 1e-9 * (1.0 + max_abs(c.phi)));
      CHECK(lie::unipotent_defect(hn, c.phi) == 0.0);
      // same filtration, different adapted basis
      const Mat moved = sampling::block_lower(hn, rng) * frame;
      CHECK(max_abs(nplus_coords(ctx, moved).phi - c.phi) < 1e-8 * (1.0 + max_abs(c.phi)));
      // round trip through the frame
      const Mat back = frame_of_coords(ctx, c);
      CHECK(max_abs(nplus_coords(ctx, back).phi - c.phi) < 1e-9 * (1.0 + max_abs(c.phi)));
    }
  }
}

TEST_CASE("block lower is the stabilizer of the base") {
  const Context ctx = ctx_of(2, {2, 1, 2});
  CounterRng rng(2);
  const Mat b = sampling::block_lower(ctx.hodge(), rng);
  const NPlusCoords c = nplus_coords(ctx, b * ctx.base());
  CHECK(max_abs(c.phi - Mat::Identity(5, 5)) < 1e-12);
}

TEST_CASE("membership sweep serial and parallel agree") {
  const Context ctx = ctx_of(2, {1, 2, 1});
  const auto s = kernels::membership_sweep(ctx, 400, 17, false);
  const auto p = kernels::membership_sweep(ctx, 400, 17, true);
  CHECK(s.agree == s.frames);
  CHECK(s.lu_ok == 300);
  CHECK(s.minors_ok == 300);
  CHECK(s.max_uniqueness < 1e-8);
  CHECK(s.max_b_invariance < 1e-7);
  CHECK(s.max_reconstruction < 1e-12);
  CHECK(p.lu_ok == s.lu_ok);
  CHECK(p.minors_ok == s.minors_ok);
  CHECK(p.max_uniqueness == s.max_uniqueness);
  CHECK(p.max_b_invariance == s.max_b_invariance);
  CHECK(p.max_reconstruction == s.max_reconstruction);
}
