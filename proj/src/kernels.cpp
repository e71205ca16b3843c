#include "hodgekit/kernels.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "hodgekit/linalg.hpp"
#include "hodgekit/sampling.hpp"

namespace hodge::kernels {

namespace {

// 0 = singular draw, 1 = outside N_+, 2 = inside.
int classify(const Context& ctx, const Mat& frame) {
  if (linalg::numerical_rank(frame, ctx.tol().rank) < frame.rows()) return 0;
  const auto margins = leading_minor_margins(ctx.hodge(), coefficient_matrix(ctx, frame));
  for (double v : margins)
    if (!(v > ctx.tol().minor)) return 1;
  return 2;
}

DensityResult tally(const std::vector<int>& cls) {
  DensityResult r;
  r.samples = static_cast<std::int64_t>(cls.size());
  for (int c : cls) {
    if (c == 0) ++r.singular;
    if (c == 2) ++r.in_nplus;
  }
  const auto valid = r.samples - r.singular;
  r.fraction = valid > 0 ? static_cast<double>(r.in_nplus) / static_cast<double>(valid) : 0.0;
  return r;
}

}  // namespace

DensityResult density_probe(const Context& ctx, std::int64_t samples, std::uint64_t seed,
                            bool parallel) {
  std::vector<int> cls(static_cast<std::size_t>(std::max<std::int64_t>(samples, 0)));
  for_each_index(samples, parallel, [&](std::int64_t s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    cls[static_cast<std::size_t>(s)] = classify(ctx, sampling::gaussian(ctx.dim(), ctx.dim(), rng));
  });
  return tally(cls);
}

DensityResult density_probe(const Context& ctx, const std::vector<Mat>& frames) {
  std::vector<int> cls;
  for (const auto& f : frames) cls.push_back(classify(ctx, f));
  return tally(cls);
}

MembershipSweep membership_sweep(const Context& ctx, std::int64_t frames, std::uint64_t seed,
                                 bool parallel) {
  struct Slot {
    bool lu = false, minors = false;
    double uniq = 0.0, binv = 0.0, recon = 0.0;
  };
  const auto& hn = ctx.hodge();
  std::vector<Slot> slots(static_cast<std::size_t>(std::max<std::int64_t>(frames, 0)));
  for_each_index(frames, parallel, [&](std::int64_t s) {
    CounterRng rng(seed, static_cast<std::uint64_t>(s));
    Slot& out = slots[static_cast<std::size_t>(s)];
    // Every fourth frame is pushed onto the complement of N_+ by zeroing the
    // first coefficient block, so both verdicts are exercised.
    Mat a = sampling::gaussian(ctx.dim(), ctx.dim(), rng);
    if (s % 4 == 3) block(a, hn, 0, 0).setZero();
    const Mat frame = a * ctx.base();
    const BlockLu f = block_lu(ctx, coefficient_matrix(ctx, frame));
    const auto margins = leading_minor_margins(hn, coefficient_matrix(ctx, frame));
    out.lu = f.ok;
    out.minors = std::all_of(margins.begin(), margins.end(),
                             [&](double v) { return v > ctx.tol().minor; });
    if (f.ok) {
      out.recon = (a - f.lower * f.unipotent).norm() / a.norm();
      if (out.minors) {
        const NPlusCoords other = nplus_coords_by_minors(ctx, frame);
        out.uniq = max_abs(other.phi - f.unipotent);
      }
      const Mat b = sampling::block_lower(hn, rng);
      const BlockLu g = block_lu(ctx, coefficient_matrix(ctx, b * frame));
      out.binv = g.ok ? max_abs(g.unipotent - f.unipotent) : std::numeric_limits<double>::infinity();
    }
  });
  MembershipSweep r;
  r.frames = frames;
  for (const auto& s : slots) {
    r.lu_ok += s.lu;
    r.minors_ok += s.minors;
    r.agree += (s.lu == s.minors);
    r.max_uniqueness = std::max(r.max_uniqueness, s.uniq);
    r.max_b_invariance = std::max(r.max_b_invariance, s.binv);
    r.max_reconstruction = std::max(r.max_reconstruction, s.recon);
  }
  return r;
}

std::vector<PsiReport> psi_grid(const Context& ctx, const AbelianSubalgebra& a,
                                const HorizontalFamily& family,
                                const std::vector<std::vector<cplx>>& grid, bool parallel) {
  std::vector<PsiReport> out(grid.size());
  for_each_index(static_cast<std::int64_t>(grid.size()), parallel, [&](std::int64_t i) {
    out[static_cast<std::size_t>(i)] = psi(ctx, a, family, grid[static_cast<std::size_t>(i)]);
  });
  return out;
}

TransversalityBatch transversality_batch(const Context& ctx, int families, int points,
                                         int max_generators, double radius, std::uint64_t seed,
                                         bool parallel) {
  struct Slot {
    std::int64_t evals = 0;
    double max_res = 0.0, max_fd = 0.0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(std::max(families, 0)));
  for_each_index(families, parallel, [&](std::int64_t f) {
    CounterRng rng(seed, static_cast<std::uint64_t>(f));
    const int want = 1 + static_cast<int>(f % std::max(1, max_generators));
    auto gens = sampling::abelian_generators(ctx, want, rng);
    Slot& s = slots[static_cast<std::size_t>(f)];
    if (gens.empty()) return;
    const HorizontalFamily fam = HorizontalFamily::abelian(ctx, gens, radius);
    const int N = fam.dimension();
    for (int p = 0; p < points; ++p) {
      std::vector<cplx> z(N);
      for (auto& c : z) {
        const double r = radius * std::sqrt(rng.uniform());
        const double th = 2.0 * std::numbers::pi * rng.uniform();
        c = std::polar(r, th);
      }
      for (int mu = 0; mu < N; ++mu) {
        const TransversalityResult t = transversality_residual(ctx, fam, z, mu);
        s.max_res = std::max(s.max_res, t.residual);
        s.max_fd = std::max(s.max_fd, t.fd_discrepancy);
        ++s.evals;
      }
    }
  });
  TransversalityBatch b;
  b.min_residual = std::numeric_limits<double>::infinity();
  for (const auto& s : slots) {
    b.evaluations += s.evals;
    b.max_residual = std::max(b.max_residual, s.max_res);
    b.max_fd_discrepancy = std::max(b.max_fd_discrepancy, s.max_fd);
    b.min_residual = std::min(b.min_residual, s.max_res);
  }
  return b;
}

}  // namespace hodge::kernels
