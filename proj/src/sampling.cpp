#include "hodgekit/sampling.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "hodgekit/lie_structure.hpp"
#include "hodgekit/linalg.hpp"

namespace hodge::sampling {

namespace {

Mat rescaled(Mat x, double norm) {
  const double f = x.norm();
  if (f == 0.0) return x;
  return x * (norm / f);
}

}  // namespace

Mat gaussian(Eigen::Index rows, Eigen::Index cols, CounterRng& rng) {
  Mat a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.complex_normal();
  return a;
}

Mat graded_element(const Context& ctx, int k, CounterRng& rng, double norm) {
  Mat x = Mat::Zero(ctx.dim(), ctx.dim());
  for (const auto& b : ctx.graded_basis(k)) x += rng.complex_normal() * b;
  return rescaled(std::move(x), norm);
}

Mat algebra_element(const Context& ctx, CounterRng& rng, double norm) {
  Mat x = Mat::Zero(ctx.dim(), ctx.dim());
  for (int k = -ctx.weight(); k <= ctx.weight(); ++k)
    for (const auto& b : ctx.graded_basis(k)) x += rng.complex_normal() * b;
  return rescaled(std::move(x), norm);
}

Mat nilpotent(const HodgeNumbers& hn, CounterRng& rng, double norm) {
  return rescaled(lie::strictly_upper(hn, gaussian(hn.dim(), hn.dim(), rng)), norm);
}

Mat block_lower(const HodgeNumbers& hn, CounterRng& rng) {
  return lie::lower_with_diagonal(hn, gaussian(hn.dim(), hn.dim(), rng));
}

Mat real_group_element(const Context& ctx, CounterRng& rng, double norm) {
  const Mat& q = ctx.q();
  if (max_abs(q.imag()) > 0.0)
    throw Error(ErrorKind::ShapeMismatch, "real group sampling needs a real polarization");
  const Eigen::Index m = ctx.dim();
  RMat r(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) r(i, j) = rng.normal();
  const RMat qr = q.real();
  const RMat lhs = ctx.weight() % 2 == 0 ? RMat(r - r.transpose()) : RMat(r + r.transpose());
  RMat t = lhs * qr.inverse();
  if (t.norm() > 0.0) t *= norm / t.norm();
  const RMat g = t.exp();
  return ctx.base() * g.cast<cplx>() * ctx.base_inverse();
}

Mat complex_group_element(const Context& ctx, CounterRng& rng, double norm) {
  const Mat x = algebra_element(ctx, rng, norm);
  return x.exp();
}

std::vector<Mat> abelian_generators(const Context& ctx, int count, CounterRng& rng, double norm) {
  const auto& basis = ctx.graded_basis(-1);
  const auto d = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index m = ctx.dim();
  std::vector<Mat> chosen;
  while (static_cast<int>(chosen.size()) < count && d > 0) {
    Mat null;
    if (chosen.empty()) {
      null = Mat::Identity(d, d);
    } else {
      Mat sys(static_cast<Eigen::Index>(chosen.size()) * m * m, d);
      for (Eigen::Index i = 0; i < d; ++i) {
        Eigen::Index off = 0;
        for (const auto& x : chosen) {
          sys.block(off, i, m * m, 1) = lie::bracket(basis[i], x).reshaped();
          off += m * m;
        }
      }
      // brackets are exactly zero up to roundoff when g^{-1,1} is abelian
      null = max_abs(sys) < 1e-12 ? Mat(Mat::Identity(d, d)) : linalg::nullspace(sys, 1e-10);
    }
    if (null.cols() <= static_cast<Eigen::Index>(chosen.size())) break;
    Vec w = null * gaussian(null.cols(), 1, rng);
    Mat x = Mat::Zero(m, m);
    for (Eigen::Index i = 0; i < d; ++i) x += w(i) * basis[i];
    chosen.push_back(rescaled(std::move(x), norm));
  }
  return chosen;
}

}  // namespace hodge::sampling
