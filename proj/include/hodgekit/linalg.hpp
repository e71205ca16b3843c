#pragma once

#include "hodgekit/types.hpp"

namespace hodge::linalg {

// Numerical rank rule used everywhere: singular values above
// rel_tol * sigma_max count.
int numerical_rank(const Mat& a, double rel_tol);

/// Orthonormal columns spanning ker(a).
Mat nullspace(const Mat& a, double rel_tol);

/// Reduced row-echelon form of the rows of `rows`; entries below 1e-14 in
/// magnitude are flushed to zero. Used to make extracted bases canonical.
Mat row_echelon(const Mat& rows, double pivot_tol = 1e-10);

Mat hermitian_part(const Mat& a);
Mat hermitian_sqrt(const Mat& a);
Mat hermitian_inv_sqrt(const Mat& a);
double min_eigenvalue(const Mat& hermitian);
double max_eigenvalue(const Mat& hermitian);

/// Singular values, descending.
Eigen::VectorXd singular_values(const Mat& a);

inline double frobenius(const Mat& a) { return a.norm(); }

}  // namespace hodge::linalg
