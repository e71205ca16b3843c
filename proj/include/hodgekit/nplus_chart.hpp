#pragma once

#include <vector>

#include "hodgekit/hodge_core.hpp"

namespace hodge {

/// Block upper unitriangular chart coordinates Phi of a point of N_+.
struct NPlusCoords {
  Mat phi;

  auto block(const HodgeNumbers& hn, int alpha, int beta) const {
    return hodge::block(phi, hn, alpha, beta);
  }
};

/// Result of the block factorization A = lower * unipotent, where `lower` is
/// block lower triangular (the stabilizer part) and `unipotent` is block upper
/// unitriangular (the N_+ part). Rows are basis vectors, so left
/// multiplication by a block lower matrix is a change of adapted basis and
/// leaves the filtration unchanged.
struct BlockLu {
  bool ok = false;
  int failed_block = -1;        // first k whose pivot block is singular
  double pivot_margin = 0.0;    // min over k of sigma_min(pivot_k) / ||A||_F
  Mat lower;
  Mat unipotent;
};

/// Block Gaussian elimination without pivoting.
BlockLu block_lu(const Context& ctx, const Mat& a);

/// |det A_k| / prod(row norms of A_k) for the leading principal block
/// submatrices A_k = (A^{(alpha,beta)})_{alpha,beta<=k}.
std::vector<double> leading_minor_margins(const HodgeNumbers& hn, const Mat& a);

/// Coefficients of the frame rows in base coordinates: frame = A * eta.
Mat coefficient_matrix(const Context& ctx, const Mat& frame);

/// Chart coordinates of a filtration frame. Throws NotInNPlus with the
/// failing block index.
NPlusCoords nplus_coords(const Context& ctx, const Mat& frame);

/// Same coordinates computed block row by block row from the leading
/// principal submatrices: the unique rows eta_(alpha) + sum Phi eta_(beta) in
/// F^{n-alpha}. Independent of block_lu; used to cross-check uniqueness.
NPlusCoords nplus_coords_by_minors(const Context& ctx, const Mat& frame);

/// Rows Phi * eta.
Mat frame_of_coords(const Context& ctx, const NPlusCoords& coords);

struct MembershipReport {
  bool in_nplus = false;
  std::vector<double> minor_margins;
  bool in_D = false;
  double hr2_margin = 0.0;
};

MembershipReport membership(const Context& ctx, const Mat& frame, double tol);
inline MembershipReport membership(const Context& ctx, const Mat& frame) {
  return membership(ctx, frame, ctx.tol().minor);
}

}  // namespace hodge
