#pragma once

#include <string>
#include <vector>

#include "hodgekit/curve.hpp"

namespace hodge {

/// V_alpha : d_alpha x d_{alpha+1}, alpha = 0..n-1.
struct HorizontalTangent {
  std::vector<Mat> v;
};

struct GramData {
  std::vector<Mat> grams;
  double m_bound = 0.0;  // min over alpha of sqrt(lambda_min(G_alpha))
  double M_bound = 0.0;  // max over alpha of sqrt(lambda_max(G_alpha))
  double min_eigenvalue = 0.0;
};

enum class NormMode { HilbertSchmidt, ScalarL1 };

GramData gram_blocks(const Context& ctx, const Mat& frame);
GramData gram_data_from(std::vector<Mat> grams);

/// Superdiagonal blocks (alpha, alpha+1) of Phi' Phi^{-1}.
HorizontalTangent tangent_of(const HodgeNumbers& hn, const Mat& phi, const Mat& phi_dot);
/// Superdiagonal blocks of x.
HorizontalTangent superdiagonal(const HodgeNumbers& hn, const Mat& x);

double horizontal_norm(const Context& ctx, const GramData& g, const HorizontalTangent& v,
                       NormMode mode);
double horizontal_norm(const Context& ctx, const Mat& frame, const HorizontalTangent& v,
                       NormMode mode);
/// Hermitian inner product matching the hs norm.
cplx horizontal_inner(const GramData& g, const HorizontalTangent& u, const HorizontalTangent& v);

/// Sum_alpha ||V_alpha||_F sqrt(lambda_min(G_{alpha+1}) / lambda_max(G_alpha)).
double l1_lower_integrand(const GramData& g, const HorizontalTangent& v);

double euclidean_speed(const Mat& phi_dot);

struct LengthReport {
  double hodge_hs = 0.0;
  double hodge_l1_lowerbound = 0.0;
  double euclidean = 0.0;
  double gram_m = 0.0;
  double gram_M = 0.0;
  /// Integral of sum_alpha ||Phi'^{(alpha,alpha+1)}||_F.
  double euclidean_superdiagonal = 0.0;
  /// Integral of ||Phi'^{(alpha,alpha+1)}||_F per alpha.
  std::vector<double> superdiagonal_lengths;
  double error_estimate = 0.0;
  int evaluations = 0;
};

LengthReport curve_lengths(const Context& ctx, const SampledCurve& curve);
LengthReport curve_lengths(const Context& ctx, const SampledCurve& curve, double tol);

}  // namespace hodge
