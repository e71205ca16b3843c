#include "hodgekit/lie_structure.hpp"

#include <algorithm>

#include "hodgekit/linalg.hpp"

namespace hodge {

std::map<int, Mat> GradedEndo::components(const HodgeNumbers& hn) const {
  std::map<int, Mat> out;
  for (int k = -hn.weight(); k <= hn.weight(); ++k) out[k] = lie::grade_component(hn, matrix, k);
  return out;
}

namespace lie {

Mat grade_component(const HodgeNumbers& hn, const Mat& x, int k) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (int a = 0; a <= hn.weight(); ++a) {
    const int b = a - k;
    if (b < 0 || b > hn.weight()) continue;
    block(out, hn, a, b) = block(x, hn, a, b);
  }
  return out;
}

double lie_algebra_residual(const Context& ctx, const Mat& x) {
  return max_abs(x * ctx.q_eta() + ctx.q_eta() * x.transpose());
}

std::vector<Mat> solve_graded_basis(const HodgeNumbers& hn, const Mat& q_eta, int k,
                                    double rank_tol) {
  const int m = hn.dim();
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a <= hn.weight(); ++a) {
    const int b = a - k;
    if (b < 0 || b > hn.weight()) continue;
    for (int i = 0; i < hn.block_size(a); ++i)
      for (int j = 0; j < hn.block_size(b); ++j)
        slots.emplace_back(hn.block_offset(a) + i, hn.block_offset(b) + j);
  }
  if (slots.empty()) return {};

  // Column s holds vec(E_s Q + Q E_s^T) for the elementary matrix on slot s.
  Mat system = Mat::Zero(static_cast<Eigen::Index>(m) * m, static_cast<Eigen::Index>(slots.size()));
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto [r, c] = slots[s];
    Mat img = Mat::Zero(m, m);
    img.row(r) += q_eta.row(c);
    img.col(r) += q_eta.col(c);
    system.col(static_cast<Eigen::Index>(s)) = img.reshaped();
  }
  Mat ker = linalg::nullspace(system, rank_tol);
  if (ker.cols() == 0) return {};
  Mat rows = linalg::row_echelon(ker.transpose());

  std::vector<Mat> basis;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    Mat x = Mat::Zero(m, m);
    for (std::size_t s = 0; s < slots.size(); ++s)
      x(slots[s].first, slots[s].second) = rows(i, static_cast<Eigen::Index>(s));
    basis.push_back(std::move(x));
  }
  return basis;
}

int algebra_dimension(const Context& ctx) {
  int total = 0;
  for (int k = -ctx.weight(); k <= ctx.weight(); ++k)
    total += static_cast<int>(ctx.graded_basis(k).size());
  return total;
}

double lower_part_norm(const HodgeNumbers& hn, const Mat& x) {
  double r = 0.0;
  for (int a = 0; a <= hn.weight(); ++a)
    for (int b = 0; b <= a; ++b) r = std::max(r, max_abs(block(x, hn, a, b)));
  return r;
}

double unipotent_defect(const HodgeNumbers& hn, const Mat& u) {
  return lower_part_norm(hn, u - Mat::Identity(u.rows(), u.cols()));
}

Mat strictly_upper(const HodgeNumbers& hn, const Mat& x) {
  Mat out = Mat::Zero(x.rows(), x.cols());
  for (int a = 0; a <= hn.weight(); ++a)
    for (int b = a + 1; b <= hn.weight(); ++b) block(out, hn, a, b) = block(x, hn, a, b);
  return out;
}

Mat lower_with_diagonal(const HodgeNumbers& hn, const Mat& x) { return x - strictly_upper(hn, x); }

Mat nilpotent_exp(const HodgeNumbers& hn, const Mat& x, double tol) {
  const double low = lower_part_norm(hn, x);
  if (low > tol * std::max(1.0, max_abs(x)))
    throw Error(ErrorKind::NotNilpotent, "generator has entries on or below the block diagonal",
                -1, low);
  Mat xs = strictly_upper(hn, x);
  return exp_series<Mat>(xs, hn.weight(), Mat::Identity(x.rows(), x.cols()));
}

DualMat nilpotent_exp(const HodgeNumbers& hn, const DualMat& x) {
  return exp_series<DualMat>(x, hn.weight(), DualMat::identity(x.rows()));
}

Mat nilpotent_log(const HodgeNumbers& hn, const Mat& u, double tol) {
  const double defect = unipotent_defect(hn, u);
  if (defect > tol * std::max(1.0, max_abs(u)))
    throw Error(ErrorKind::NotUnipotent, "matrix is not block upper unitriangular", -1, defect);
  Mat nil = strictly_upper(hn, u);
  return log_series<Mat>(nil, hn.weight());
}

DualMat nilpotent_log(const HodgeNumbers& hn, const DualMat& u) {
  DualMat nil{u.v - Mat::Identity(u.rows(), u.cols()), u.d};
  return log_series<DualMat>(nil, hn.weight());
}

}  // namespace lie
}  // namespace hodge
