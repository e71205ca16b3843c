#include "hodgekit/hodge_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hodgekit/lie_structure.hpp"
#include "hodgekit/linalg.hpp"

namespace hodge {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidHodgeNumbers: return "InvalidHodgeNumbers";
    case ErrorKind::SymmetryMismatch: return "SymmetryMismatch";
    case ErrorKind::HodgeRiemannViolation: return "HodgeRiemannViolation";
    case ErrorKind::RealityViolation: return "RealityViolation";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::DegenerateIntersection: return "DegenerateIntersection";
    case ErrorKind::NotNilpotent: return "NotNilpotent";
    case ErrorKind::NotUnipotent: return "NotUnipotent";
    case ErrorKind::NotInNPlus: return "NotInNPlus";
    case ErrorKind::NonScalarGram: return "NonScalarGram";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SampleOutsideChart: return "SampleOutsideChart";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::NotHorizontalGenerator: return "NotHorizontalGenerator";
    case ErrorKind::NotHorizontal: return "NotHorizontal";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::LeftChart: return "LeftChart";
    case ErrorKind::NotAbelian: return "NotAbelian";
    case ErrorKind::RankDrop: return "RankDrop";
    case ErrorKind::LevelTooSmall: return "LevelTooSmall";
    case ErrorKind::NotCongruentToIdentity: return "NotCongruentToIdentity";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::JobError: return "JobError";
  }
  return "Unknown";
}

HodgeNumbers::HodgeNumbers(int weight, std::vector<int> h) : weight_(weight), h_(std::move(h)) {
  if (weight_ < 0) throw Error(ErrorKind::InvalidHodgeNumbers, "negative weight");
  if (static_cast<int>(h_.size()) != weight_ + 1)
    throw Error(ErrorKind::InvalidHodgeNumbers, "expected weight+1 Hodge numbers");
  for (int a = 0; a <= weight_; ++a) {
    if (h_[a] <= 0) throw Error(ErrorKind::InvalidHodgeNumbers, "Hodge numbers must be positive", a);
    if (h_[a] != h_[weight_ - a])
      throw Error(ErrorKind::InvalidHodgeNumbers, "Hodge symmetry h^{p,q} = h^{q,p} fails", a);
  }
  offsets_.assign(weight_ + 2, 0);
  for (int a = 0; a <= weight_; ++a) offsets_[a + 1] = offsets_[a] + h_[a];
}

int HodgeNumbers::f(int k) const {
  if (k > weight_) return 0;
  if (k < 0) return dim();
  return offsets_[weight_ - k + 1];
}

const std::vector<Mat>& Context::graded_basis(int k) const {
  static const std::vector<Mat> empty;
  auto it = d_->graded.find(k);
  return it == d_->graded.end() ? empty : it->second;
}

Context Context::with_tolerances(const Tolerances& tol) const {
  auto d = std::make_shared<Data>(*d_);
  d->tol = tol;
  return Context(std::move(d));
}

namespace {

// Real coordinates assigned to the pair slots (a, b) of blocks alpha < n - alpha
// in order, followed by one coordinate per slot of the middle block.
struct Layout {
  struct Pair { int alpha, slot, a, b; };
  std::vector<Pair> pairs;
  std::vector<int> middle;
};

Layout canonical_layout(const HodgeNumbers& hn) {
  Layout lay;
  const int n = hn.weight();
  int next = 0;
  for (int alpha = 0; alpha < n - alpha; ++alpha) {
    for (int j = 0; j < hn.block_size(alpha); ++j) {
      lay.pairs.push_back({alpha, j, next, next + 1});
      next += 2;
    }
  }
  if (n % 2 == 0) {
    for (int j = 0; j < hn.block_size(n / 2); ++j) lay.middle.push_back(next++);
  }
  return lay;
}

double reality_residual_impl(const HodgeNumbers& hn, const Mat& frame) {
  double r = 0.0;
  for (int a = 0; a <= hn.weight(); ++a) {
    Mat diff = row_block(frame, hn, hn.weight() - a) - row_block(frame, hn, a).conjugate();
    r = std::max(r, max_abs(diff));
  }
  return r;
}

double hr1_impl(const HodgeNumbers& hn, const Mat& q, const Mat& frame) {
  const int n = hn.weight();
  double r = 0.0;
  for (int i = 1; i <= n; ++i) {
    const int fa = hn.f(i);
    const int fb = hn.f(n - i + 1);
    if (fa == 0 || fb == 0) continue;
    Mat g = frame.topRows(fa) * q * frame.topRows(fb).transpose();
    r = std::max(r, max_abs(g));
  }
  return r;
}

std::vector<Mat> grams_impl(const HodgeNumbers& hn, const Mat& q, const Mat& dec) {
  std::vector<Mat> out;
  const int n = hn.weight();
  for (int a = 0; a <= n; ++a) {
    Mat c = row_block(dec, hn, a);
    out.push_back(linalg::hermitian_part(ipow(n - 2 * a) * (c * q * c.adjoint())));
  }
  return out;
}

// Orthonormal rows spanning the row space of r.
Mat orthonormal_rows(const Mat& r, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(r.adjoint(), Eigen::ComputeThinU);
  const int rank = linalg::numerical_rank(r, rel_tol);
  return svd.matrixU().leftCols(rank).adjoint();
}

Mat decomposition_impl(const HodgeNumbers& hn, const Mat& frame, double rel_tol) {
  const int n = hn.weight();
  const int m = hn.dim();
  if (frame.rows() != m || frame.cols() != m)
    throw Error(ErrorKind::ShapeMismatch, "frame must be m x m");
  std::vector<Mat> pieces;
  for (int a = 0; a <= n; ++a) {
    // H^{n-a,a} = F^{n-a} cap conj(F^a); F^{n-a} = blocks 0..a, F^a = blocks 0..n-a.
    Mat r1 = orthonormal_rows(leading_rows(frame, hn, a), rel_tol);
    Mat r2 = orthonormal_rows(leading_rows(frame, hn, n - a), rel_tol).conjugate();
    Mat stacked(r1.rows() + r2.rows(), m);
    stacked << r1, -r2;
    Mat ker = linalg::nullspace(stacked.transpose(), rel_tol);
    if (ker.cols() != hn.block_size(a))
      throw Error(ErrorKind::DegenerateIntersection,
                  "F^p cap conj(F^q) has dimension " + std::to_string(ker.cols()), a,
                  static_cast<double>(ker.cols()));
    Mat coeff = ker.topRows(r1.rows()).transpose();
    pieces.push_back(orthonormal_rows(coeff * r1, rel_tol));
    if (pieces.back().rows() != hn.block_size(a))
      throw Error(ErrorKind::DegenerateIntersection, "intersection basis lost rank", a);
  }
  Mat e(m, m);
  for (int a = 0; a <= n; ++a) e.middleRows(hn.block_offset(a), hn.block_size(a)) = pieces[a];
  if (linalg::numerical_rank(e, rel_tol) < m)
    throw Error(ErrorKind::DegenerateIntersection, "Hodge pieces do not span H");
  // Components of each filtration row along the pieces.
  Mat c = e.transpose().partialPivLu().solve(frame.transpose()).transpose();
  Mat out(m, m);
  for (int a = 0; a <= n; ++a) {
    const int off = hn.block_offset(a), d = hn.block_size(a);
    out.middleRows(off, d) = c.block(off, off, d, d) * pieces[a];
  }
  return out;
}

}  // namespace

Mat canonical_polarization(const HodgeNumbers& hn) {
  const int n = hn.weight();
  const int m = hn.dim();
  Mat q = Mat::Zero(m, m);
  const Layout lay = canonical_layout(hn);
  for (const auto& p : lay.pairs) {
    if (n % 2 == 1) {
      const double s = ipow(2 * p.alpha - n - 1).real();
      q(p.a, p.b) = s;
      q(p.b, p.a) = -s;
    } else {
      const double s = ((p.alpha - n / 2) % 2 == 0) ? 1.0 : -1.0;
      q(p.a, p.a) = s;
      q(p.b, p.b) = s;
    }
  }
  for (int c : lay.middle) q(c, c) = 1.0;
  return q;
}

Mat canonical_base_frame(const HodgeNumbers& hn) {
  const int n = hn.weight();
  const int m = hn.dim();
  Mat eta = Mat::Zero(m, m);
  const Layout lay = canonical_layout(hn);
  for (const auto& p : lay.pairs) {
    const int r = hn.block_offset(p.alpha) + p.slot;
    const int rc = hn.block_offset(n - p.alpha) + p.slot;
    eta(r, p.a) = kI;
    eta(r, p.b) = 1.0;
    eta(rc, p.a) = -kI;
    eta(rc, p.b) = 1.0;
  }
  for (std::size_t j = 0; j < lay.middle.size(); ++j)
    eta(hn.block_offset(n / 2) + static_cast<int>(j), lay.middle[j]) = 1.0;
  return eta;
}

Context build_context(const HodgeNumbers& hn, const std::optional<Mat>& q_in,
                      const std::optional<Mat>& base_in, const Tolerances& tol) {
  const int n = hn.weight();
  const int m = hn.dim();
  Mat q = q_in ? *q_in : canonical_polarization(hn);
  Mat base = base_in ? *base_in : canonical_base_frame(hn);
  if (q.rows() != m || q.cols() != m) throw Error(ErrorKind::ShapeMismatch, "Q must be m x m");
  if (base.rows() != m || base.cols() != m)
    throw Error(ErrorKind::ShapeMismatch, "base frame must be m x m");

  const double qscale = std::max(1.0, max_abs(q));
  const double sym = (n % 2 == 0) ? max_abs(q - q.transpose()) : max_abs(q + q.transpose());
  if (sym > 1e-12 * qscale)
    throw Error(ErrorKind::SymmetryMismatch,
                n % 2 == 0 ? "Q must be symmetric for even weight"
                           : "Q must be antisymmetric for odd weight",
                -1, sym);
  if (linalg::numerical_rank(q, tol.rank) < m)
    throw Error(ErrorKind::Singular, "Q is degenerate");
  if (linalg::numerical_rank(base, tol.rank) < m)
    throw Error(ErrorKind::Singular, "base frame is not invertible");

  const double bscale = std::max(1.0, max_abs(base));
  const double real_res = reality_residual_impl(hn, base);
  if (real_res > 1e-12 * bscale)
    throw Error(ErrorKind::RealityViolation, "base frame is not a real decomposition frame", -1,
                real_res);

  const double hr1 = hr1_impl(hn, q, base);
  if (hr1 > 1e-10 * qscale * bscale * bscale)
    throw Error(ErrorKind::HodgeRiemannViolation, "base frame fails the first relation", -1, hr1);
  // Blocks must also be Q-orthogonal across non-paired positions; checked via
  // the Grams of the base read as a decomposition.
  const auto grams = grams_impl(hn, q, base);
  for (int a = 0; a <= n; ++a) {
    const double margin = linalg::min_eigenvalue(grams[a]);
    if (!(margin > 0.0))
      throw Error(ErrorKind::HodgeRiemannViolation, "base frame fails the second relation", a,
                  margin);
  }

  auto d = std::make_shared<Context::Data>(Context::Data{hn, PolarizationForm{q}, base, {}, {}, {},
                                                         {}, {}, tol, !q_in, !base_in});
  d->base_inv = base.inverse();
  d->q_eta = base * q * base.transpose();
  Mat diag = Mat::Zero(m, m);
  Mat norm = Mat::Zero(m, m);
  for (int a = 0; a <= n; ++a) {
    block(diag, hn, a, a) = ipow(n - 2 * a) * Mat::Identity(hn.block_size(a), hn.block_size(a));
    block(norm, hn, a, a) = linalg::hermitian_inv_sqrt(grams[a]);
  }
  d->weil_base = d->base_inv * diag * base;
  d->normalizer = norm;
  for (int k = -n; k <= n; ++k)
    d->graded[k] = lie::solve_graded_basis(hn, d->q_eta, k, tol.rank);
  return Context(std::move(d));
}

double check_hr1(const Context& ctx, const Mat& frame) {
  return hr1_impl(ctx.hodge(), ctx.q(), frame);
}

double reality_residual(const Context& ctx, const Mat& frame) {
  return reality_residual_impl(ctx.hodge(), frame);
}

Mat decomposition_from_filtration(const Context& ctx, const Mat& frame) {
  return decomposition_impl(ctx.hodge(), frame, ctx.tol().rank);
}

std::vector<Mat> hodge_grams(const Context& ctx, const Mat& dec) {
  return grams_impl(ctx.hodge(), ctx.q(), dec);
}

double check_hr2(const Context& ctx, const Mat& frame) {
  const auto grams = hodge_grams(ctx, decomposition_from_filtration(ctx, frame));
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& g : grams) margin = std::min(margin, linalg::min_eigenvalue(g));
  return margin;
}

Mat weil_operator(const Context& ctx, const Mat& dec) {
  const auto& hn = ctx.hodge();
  const int m = hn.dim();
  Mat diag = Mat::Zero(m, m);
  for (int a = 0; a <= hn.weight(); ++a)
    block(diag, hn, a, a) =
        ipow(hn.weight() - 2 * a) * Mat::Identity(hn.block_size(a), hn.block_size(a));
  return dec.partialPivLu().solve(diag * dec);
}

cplx hodge_form_with(const Context& ctx, const Mat& weil, const RowVec& u, const RowVec& v) {
  RowVec cu = u * weil;
  return ctx.polarization()(cu, v.conjugate());
}

cplx hodge_form(const Context& ctx, const Mat& dec, const RowVec& u, const RowVec& v) {
  return hodge_form_with(ctx, weil_operator(ctx, dec), u, v);
}

}  // namespace hodge
