#pragma once

// Batch sweeps with an OpenMP path and a serial reference path. Both visit
// the same indices, draw from the same per-index random streams and write to
// per-index slots, so their results are bitwise identical.

#include <cstdint>
#include <vector>

#include "hodgekit/affine_chart.hpp"

namespace hodge::kernels {

template <class F>
void for_each_index(std::int64_t count, bool parallel, F&& f) {
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t i = 0; i < count; ++i) f(i);
  } else {
    for (std::int64_t i = 0; i < count; ++i) f(i);
  }
}

struct DensityResult {
  std::int64_t samples = 0;
  std::int64_t singular = 0;  // rejected non-invertible draws
  std::int64_t in_nplus = 0;
  double fraction = 0.0;      // in_nplus / (samples - singular)
};

/// Frames with independent standard complex normal entries; sample s uses
/// stream s of the seed.
DensityResult density_probe(const Context& ctx, std::int64_t samples, std::uint64_t seed,
                            bool parallel);
/// Explicit list mode.
DensityResult density_probe(const Context& ctx, const std::vector<Mat>& frames);

struct MembershipSweep {
  std::int64_t frames = 0;
  std::int64_t lu_ok = 0;
  std::int64_t minors_ok = 0;
  std::int64_t agree = 0;
  double max_uniqueness = 0.0;    // block_lu vs minor-based coordinates
  double max_b_invariance = 0.0;  // coordinates after a random B translation
  double max_reconstruction = 0.0;  // ||A - lower * unipotent|| / ||A||
};

MembershipSweep membership_sweep(const Context& ctx, std::int64_t frames, std::uint64_t seed,
                                 bool parallel);

std::vector<PsiReport> psi_grid(const Context& ctx, const AbelianSubalgebra& a,
                                const HorizontalFamily& family,
                                const std::vector<std::vector<cplx>>& grid, bool parallel);

struct TransversalityBatch {
  std::int64_t evaluations = 0;
  double max_residual = 0.0;
  double max_fd_discrepancy = 0.0;
  double min_residual = 0.0;
};

/// Random abelian families (sizes 1..max_generators, capped by the commutant)
/// evaluated at random points of the disc of radius `radius` in every
/// coordinate and direction.
TransversalityBatch transversality_batch(const Context& ctx, int families, int points,
                                         int max_generators, double radius, std::uint64_t seed,
                                         bool parallel);

}  // namespace hodge::kernels
