#include "hodgekit/nplus_chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hodgekit/linalg.hpp"

namespace hodge {

BlockLu block_lu(const Context& ctx, const Mat& a) {
  const auto& hn = ctx.hodge();
  const int n = hn.weight();
  const int m = hn.dim();
  BlockLu out;
  if (a.rows() != m || a.cols() != m) throw Error(ErrorKind::ShapeMismatch, "A must be m x m");
  out.lower = Mat::Zero(m, m);
  out.unipotent = Mat::Identity(m, m);
  const double scale = a.norm();
  if (scale == 0.0) {
    out.failed_block = 0;
    return out;
  }
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) {
    for (int al = k; al <= n; ++al) {
      Mat acc = block(a, hn, al, k);
      for (int g = 0; g < k; ++g) acc -= block(out.lower, hn, al, g) * block(out.unipotent, hn, g, k);
      block(out.lower, hn, al, k) = acc;
    }
    const Mat pivot = block(out.lower, hn, k, k);
    const Eigen::VectorXd s = linalg::singular_values(pivot);
    const double pm = s(s.size() - 1) / scale;
    margin = std::min(margin, pm);
    if (!(pm > ctx.tol().minor)) {
      out.failed_block = k;
      out.pivot_margin = pm;
      return out;
    }
    const auto lu = pivot.partialPivLu();
    for (int be = k + 1; be <= n; ++be) {
      Mat acc = block(a, hn, k, be);
      for (int g = 0; g < k; ++g) acc -= block(out.lower, hn, k, g) * block(out.unipotent, hn, g, be);
      block(out.unipotent, hn, k, be) = lu.solve(acc);
    }
  }
  out.ok = true;
  out.pivot_margin = margin;
  return out;
}

std::vector<double> leading_minor_margins(const HodgeNumbers& hn, const Mat& a) {
  std::vector<double> out;
  for (int k = 0; k <= hn.weight(); ++k) {
    const int s = hn.block_offset(k) + hn.block_size(k);
    const Mat ak = a.topLeftCorner(s, s);
    double denom = 1.0;
    for (int i = 0; i < s; ++i) denom *= ak.row(i).norm();
    out.push_back(denom == 0.0 ? 0.0 : std::abs(ak.fullPivLu().determinant()) / denom);
  }
  return out;
}

Mat coefficient_matrix(const Context& ctx, const Mat& frame) {
  if (frame.rows() != ctx.dim() || frame.cols() != ctx.dim())
    throw Error(ErrorKind::ShapeMismatch, "frame must be m x m");
  return frame * ctx.base_inverse();
}

NPlusCoords nplus_coords(const Context& ctx, const Mat& frame) {
  BlockLu f = block_lu(ctx, coefficient_matrix(ctx, frame));
  if (!f.ok)
    throw Error(ErrorKind::NotInNPlus, "leading block minor vanishes", f.failed_block,
                f.pivot_margin);
  return {std::move(f.unipotent)};
}

NPlusCoords nplus_coords_by_minors(const Context& ctx, const Mat& frame) {
  const auto& hn = ctx.hodge();
  const int m = hn.dim();
  const Mat a = coefficient_matrix(ctx, frame);
  const auto margins = leading_minor_margins(hn, a);
  Mat phi = Mat::Zero(m, m);
  for (int al = 0; al <= hn.weight(); ++al) {
    if (!(margins[al] > ctx.tol().minor))
      throw Error(ErrorKind::NotInNPlus, "leading block minor vanishes", al, margins[al]);
    const int s = hn.block_offset(al) + hn.block_size(al);
    const int d = hn.block_size(al);
    // C [A_k] = [0 ... 0 I]  =>  C^T = A_k^{-T} [0; I]
    Mat rhs = Mat::Zero(s, d);
    rhs.bottomRows(d) = Mat::Identity(d, d);
    Mat c = a.topLeftCorner(s, s).transpose().fullPivLu().solve(rhs).transpose();
    phi.middleRows(hn.block_offset(al), d) = c * a.topRows(s);
  }
  return {phi};
}

Mat frame_of_coords(const Context& ctx, const NPlusCoords& coords) {
  return coords.phi * ctx.base();
}

MembershipReport membership(const Context& ctx, const Mat& frame, double tol) {
  MembershipReport r;
  r.minor_margins = leading_minor_margins(ctx.hodge(), coefficient_matrix(ctx, frame));
  r.in_nplus = std::all_of(r.minor_margins.begin(), r.minor_margins.end(),
                           [tol](double v) { return v > tol; });
  try {
    r.hr2_margin = check_hr2(ctx, frame);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateIntersection) throw;
    r.hr2_margin = 0.0;
  }
  r.in_D = r.hr2_margin > 0.0;
  return r;
}

}  // namespace hodge
