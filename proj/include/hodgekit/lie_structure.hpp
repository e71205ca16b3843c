#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hodgekit/dual.hpp"
#include "hodgekit/hodge_core.hpp"

namespace hodge {

/// Endomorphism in base coordinates (row convention u -> u X) with an
/// optional grade tag when it is homogeneous.
struct GradedEndo {
  Mat matrix;
  std::optional<int> grade;

  /// X^{(k)}: block (alpha, beta) with alpha - beta = k maps
  /// H^{n-alpha,alpha} into H^{n-beta,beta}, a shift of k in the first index.
  std::map<int, Mat> components(const HodgeNumbers& hn) const;
};

namespace lie {

/// Block (alpha, beta) of an endomorphism has grade alpha - beta.
Mat grade_component(const HodgeNumbers& hn, const Mat& x, int k);

/// ||X Q_eta + Q_eta X^T||_max; zero iff X lies in g.
double lie_algebra_residual(const Context& ctx, const Mat& x);

/// Basis of g^{k,-k} from the nullspace of the linear Lie condition restricted
/// to grade-k block positions, put into reduced echelon form.
std::vector<Mat> solve_graded_basis(const HodgeNumbers& hn, const Mat& q_eta, int k,
                                    double rank_tol);

inline const std::vector<Mat>& graded_basis(const Context& ctx, int k) {
  return ctx.graded_basis(k);
}

/// Sum of dim g^{k,-k} over k.
int algebra_dimension(const Context& ctx);

inline Mat bracket(const Mat& x, const Mat& y) { return x * y - y * x; }

/// Largest entry on or below the block diagonal.
double lower_part_norm(const HodgeNumbers& hn, const Mat& x);
/// Largest entry of (u - I) on or below the block diagonal.
double unipotent_defect(const HodgeNumbers& hn, const Mat& u);

/// Strictly block upper part (n_+ projection in base coordinates).
Mat strictly_upper(const HodgeNumbers& hn, const Mat& x);
/// Block lower part including the diagonal (b projection).
Mat lower_with_diagonal(const HodgeNumbers& hn, const Mat& x);

/// Sum_{j<=order} x^j / j! for nilpotent x, generic over Mat and DualMat.
template <class M>
M exp_series(const M& x, int order, const M& identity) {
  M result = identity;
  M term = identity;
  for (int j = 1; j <= order; ++j) {
    term = (1.0 / j) * (term * x);
    result += term;
  }
  return result;
}

/// Sum_{j=1}^{order} (-1)^{j+1} n^j / j.
template <class M>
M log_series(const M& n, int order) {
  M result = (0.0) * n;
  M power = n;
  for (int j = 1; j <= order; ++j) {
    result += ((j % 2 == 1 ? 1.0 : -1.0) / j) * power;
    power = power * n;
  }
  return result;
}

/// exp on n_+: exact finite series. Throws NotNilpotent when x has entries on
/// or below the block diagonal above tol.
Mat nilpotent_exp(const HodgeNumbers& hn, const Mat& x, double tol = 1e-12);
DualMat nilpotent_exp(const HodgeNumbers& hn, const DualMat& x);

/// Inverse of nilpotent_exp on N_+. Throws NotUnipotent.
Mat nilpotent_log(const HodgeNumbers& hn, const Mat& u, double tol = 1e-12);
DualMat nilpotent_log(const HodgeNumbers& hn, const DualMat& u);

}  // namespace lie
}  // namespace hodge
