#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hodgekit/types.hpp"

namespace hodge {

/// Hodge numbers h^{n,0}, ..., h^{0,n} of a weight-n structure. Block alpha
/// of every frame holds the h^{n-alpha,alpha} rows spanning H^{n-alpha,alpha}.
class HodgeNumbers {
 public:
  HodgeNumbers(int weight, std::vector<int> h);

  int weight() const noexcept { return weight_; }
  int dim() const noexcept { return offsets_.back(); }
  int blocks() const noexcept { return weight_ + 1; }
  const std::vector<int>& h() const noexcept { return h_; }

  /// d_alpha = h^{n-alpha,alpha}.
  int block_size(int alpha) const { return h_.at(alpha); }
  /// First row of block alpha, i.e. f^{n-alpha+1}.
  int block_offset(int alpha) const { return offsets_.at(alpha); }
  /// f^k = h^{n,0} + ... + h^{k,n-k}; f^{n+1} = 0.
  int f(int k) const;

  bool operator==(const HodgeNumbers&) const = default;

 private:
  int weight_;
  std::vector<int> h_;
  std::vector<int> offsets_;
};

// Block views on m x m matrices following the (alpha, beta) convention.
inline auto block(Mat& a, const HodgeNumbers& hn, int alpha, int beta) {
  return a.block(hn.block_offset(alpha), hn.block_offset(beta), hn.block_size(alpha),
                 hn.block_size(beta));
}
inline auto block(const Mat& a, const HodgeNumbers& hn, int alpha, int beta) {
  return a.block(hn.block_offset(alpha), hn.block_offset(beta), hn.block_size(alpha),
                 hn.block_size(beta));
}
/// Rows of block alpha.
inline auto row_block(const Mat& a, const HodgeNumbers& hn, int alpha) {
  return a.middleRows(hn.block_offset(alpha), hn.block_size(alpha));
}
/// Rows of blocks 0..alpha, i.e. a spanning set of F^{n-alpha}.
inline auto leading_rows(const Mat& a, const HodgeNumbers& hn, int alpha) {
  return a.topRows(hn.block_offset(alpha) + hn.block_size(alpha));
}

/// Bilinear form Q(u, w) = u * q * w^T on row vectors.
struct PolarizationForm {
  Mat q;
  cplx operator()(const RowVec& u, const RowVec& w) const { return (u * q * w.transpose())(0, 0); }
};

/// Immutable period-domain instance: Hodge numbers, polarization, base frame
/// (a decomposition frame at the base point) and the graded Lie-algebra bases.
class Context {
 public:
  const HodgeNumbers& hodge() const noexcept { return d_->hodge; }
  int weight() const noexcept { return d_->hodge.weight(); }
  int dim() const noexcept { return d_->hodge.dim(); }
  const PolarizationForm& polarization() const noexcept { return d_->q; }
  const Mat& q() const noexcept { return d_->q.q; }
  const Mat& base() const noexcept { return d_->base; }
  const Mat& base_inverse() const noexcept { return d_->base_inv; }
  /// Gram matrix Q(eta_i, eta_j) of the polarization in base coordinates.
  const Mat& q_eta() const noexcept { return d_->q_eta; }
  const Mat& weil_base() const noexcept { return d_->weil_base; }
  /// Block-diagonal D with D G D^* = I for the base Q~-Grams G; used to
  /// Q~-orthonormalize base coordinates.
  const Mat& base_normalizer() const noexcept { return d_->normalizer; }
  const Tolerances& tol() const noexcept { return d_->tol; }
  bool canonical_q() const noexcept { return d_->canonical_q; }
  bool canonical_base() const noexcept { return d_->canonical_base; }

  /// Basis of g^{k,-k}; empty for |k| > n.
  const std::vector<Mat>& graded_basis(int k) const;

  /// Same data with a different tolerance table.
  Context with_tolerances(const Tolerances& tol) const;

 private:
  struct Data {
    HodgeNumbers hodge;
    PolarizationForm q;
    Mat base, base_inv, q_eta, weil_base, normalizer;
    std::map<int, std::vector<Mat>> graded;
    Tolerances tol;
    bool canonical_q = true;
    bool canonical_base = true;
  };
  explicit Context(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;

  friend Context build_context(const HodgeNumbers&, const std::optional<Mat>&,
                               const std::optional<Mat>&, const Tolerances&);
};

Mat canonical_polarization(const HodgeNumbers& hn);
Mat canonical_base_frame(const HodgeNumbers& hn);

/// Builds and validates a context; nullopt selects the canonical form/frame.
Context build_context(const HodgeNumbers& hn, const std::optional<Mat>& q = std::nullopt,
                      const std::optional<Mat>& base = std::nullopt, const Tolerances& tol = {});

/// max |Q(F^i, F^{n-i+1})| over i; zero iff the first bilinear relation holds.
double check_hr1(const Context& ctx, const Mat& frame);

/// Minimum eigenvalue over alpha of the Q~-Grams of the Hodge components of
/// the filtration rows. Positive iff the filtration is a point of D.
double check_hr2(const Context& ctx, const Mat& frame);

/// Max entrywise deviation of rows(block n-alpha) from conj(rows(block alpha)).
double reality_residual(const Context& ctx, const Mat& frame);

/// Block alpha of the result is the H^{n-alpha,alpha}-component of the
/// filtration rows of block alpha, where H^{n-alpha,alpha} = F^{n-alpha} cap
/// conj(F^alpha).
Mat decomposition_from_filtration(const Context& ctx, const Mat& frame);

/// Weil operator in row convention (u -> u * C) for a decomposition frame.
Mat weil_operator(const Context& ctx, const Mat& decomposition_frame);

/// Q~(u, v) = Q(C u, conj v).
cplx hodge_form(const Context& ctx, const Mat& decomposition_frame, const RowVec& u,
                const RowVec& v);
cplx hodge_form_with(const Context& ctx, const Mat& weil, const RowVec& u, const RowVec& v);

/// Hermitian Q~-Gram of each block of a decomposition frame.
std::vector<Mat> hodge_grams(const Context& ctx, const Mat& decomposition_frame);

}  // namespace hodge
