#include "hodgekit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace hodge::linalg {

Eigen::VectorXd singular_values(const Mat& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues();
}

int numerical_rank(const Mat& a, double rel_tol) {
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cut = rel_tol * s(0);
  return static_cast<int>((s.array() > cut).count());
}

Mat nullspace(const Mat& a, double rel_tol) {
  const auto cols = a.cols();
  if (cols == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(cols, cols);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  int rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cut = rel_tol * s(0);
    rank = static_cast<int>((s.array() > cut).count());
  }
  return svd.matrixV().rightCols(cols - rank);
}

Mat row_echelon(const Mat& rows, double pivot_tol) {
  Mat a = rows;
  const auto r = a.rows();
  const auto c = a.cols();
  const double scale = std::max(max_abs(a), 1e-300);
  Eigen::Index pivot_row = 0;
  for (Eigen::Index col = 0; col < c && pivot_row < r; ++col) {
    Eigen::Index best = pivot_row;
    double best_abs = 0.0;
    for (Eigen::Index i = pivot_row; i < r; ++i) {
      if (std::abs(a(i, col)) > best_abs) {
        best_abs = std::abs(a(i, col));
        best = i;
      }
    }
    if (best_abs <= pivot_tol * scale) continue;
    a.row(pivot_row).swap(a.row(best));
    a.row(pivot_row) /= a(pivot_row, col);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (i != pivot_row) a.row(i) -= a(i, col) * a.row(pivot_row);
    }
    ++pivot_row;
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      double re = a(i, j).real();
      double im = a(i, j).imag();
      if (std::abs(re) < 1e-14) re = 0.0;
      if (std::abs(im) < 1e-14) im = 0.0;
      a(i, j) = cplx(re, im);
    }
  }
  return a.topRows(pivot_row);
}

Mat hermitian_part(const Mat& a) { return 0.5 * (a + a.adjoint()); }

Mat hermitian_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  return es.operatorSqrt();
}

Mat hermitian_inv_sqrt(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(a));
  return es.operatorInverseSqrt();
}

double min_eigenvalue(const Mat& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Mat& h) {
  if (h.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace hodge::linalg
