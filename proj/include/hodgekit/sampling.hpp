#pragma once

#include <vector>

#include "hodgekit/hodge_core.hpp"
#include "hodgekit/rng.hpp"

namespace hodge::sampling {

Mat gaussian(Eigen::Index rows, Eigen::Index cols, CounterRng& rng);

/// Random combination of the g^{k,-k} basis with complex normal weights,
/// rescaled to Frobenius norm `norm` (zero if the piece is trivial).
Mat graded_element(const Context& ctx, int k, CounterRng& rng, double norm = 1.0);

/// Random element of g (all grades).
Mat algebra_element(const Context& ctx, CounterRng& rng, double norm = 1.0);

/// Random strictly block upper matrix (not necessarily in g).
Mat nilpotent(const HodgeNumbers& hn, CounterRng& rng, double norm = 1.0);

/// Random invertible block lower triangular matrix (an element of B).
Mat block_lower(const HodgeNumbers& hn, CounterRng& rng);

/// Element of the real group in base coordinates: eta exp(T) eta^{-1} with T
/// a random real solution of T Q + Q T^T = 0. Needs a real Q.
Mat real_group_element(const Context& ctx, CounterRng& rng, double norm = 0.5);

/// exp(X) for a random X in g, in base coordinates.
Mat complex_group_element(const Context& ctx, CounterRng& rng, double norm = 0.5);

/// Up to `count` commuting elements of g^{-1,1}, each of Frobenius norm
/// `norm`. Later generators are drawn from the commutant of the earlier
/// ones; fewer are returned if the commutant is exhausted.
std::vector<Mat> abelian_generators(const Context& ctx, int count, CounterRng& rng,
                                    double norm = 1.0);

}  // namespace hodge::sampling
