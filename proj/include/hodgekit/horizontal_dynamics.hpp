#pragma once

#include <span>
#include <string>
#include <vector>

#include "hodgekit/dual.hpp"
#include "hodgekit/hodge_metric.hpp"

namespace hodge {

/// xi(t) = sum_j t^j coefficients[j].
struct MatrixPolynomial {
  std::vector<Mat> coefficients;

  Mat operator()(cplx t) const;
  DualMat operator()(const Dual& t) const;
  int degree() const { return static_cast<int>(coefficients.size()) - 1; }
};

/// Throws NotHorizontalGenerator unless x lies in g^{-1,1}.
void require_horizontal_generator(const Context& ctx, const Mat& x);

/// ||Phi' Phi^{-1} minus its superdiagonal part||_max.
double horizontality_residual(const HodgeNumbers& hn, const Mat& phi, const Mat& phi_dot);
/// Pointwise residual of the curve's dense derivative, estimated by a
/// five-point difference at every interval midpoint.
double horizontality_residual(const Context& ctx, const SampledCurve& curve);

/// Samples of exp(tX) eta on the grid.
SampledCurve one_parameter_orbit(const Context& ctx, const Mat& x, const std::vector<double>& t_grid);

/// RK4 integration of Phi' = xi(t) Phi, Phi(0) = I, on [0, t_end] with fixed
/// steps. Throws StepTooLarge when the dense output is not horizontal to
/// tolerance and LeftChart if a sample cannot be put in chart coordinates.
SampledCurve develop(const Context& ctx, const MatrixPolynomial& xi, double t_end, int steps);

/// Holomorphic family z -> Phi(z) over a polydisc.
class HorizontalFamily {
 public:
  enum class Kind { Abelian, Development, Exponential };

  /// exp(sum z_i X_i) with commuting X_i in g^{-1,1}.
  static HorizontalFamily abelian(const Context& ctx, std::vector<Mat> generators, double radius = 1.0);
  /// exp(sum z_i X_i) with commuting strictly block upper X_i of any grade.
  /// Not horizontal in general; used for negative controls.
  static HorizontalFamily exponential(const Context& ctx, std::vector<Mat> generators,
                                      double radius = 1.0);
  /// One variable: Phi(z) solves dPhi/ds = z xi(s z) Phi on s in [0, 1] with
  /// a fixed number of RK4 steps.
  static HorizontalFamily development(const Context& ctx, MatrixPolynomial xi, int steps = 64,
                                      double radius = 1.0);

  Kind kind() const { return kind_; }
  int dimension() const;
  double radius() const { return radius_; }
  const std::vector<Mat>& generators() const { return generators_; }
  const MatrixPolynomial& form() const { return xi_; }
  int steps() const { return steps_; }

  Mat value(std::span<const cplx> z) const;
  /// Value and exact derivative along z_mu.
  DualMat derivative(std::span<const cplx> z, int mu) const;

 private:
  HorizontalFamily(HodgeNumbers hn) : hn_(std::move(hn)) {}
  Kind kind_ = Kind::Abelian;
  HodgeNumbers hn_;
  std::vector<Mat> generators_;
  MatrixPolynomial xi_;
  int steps_ = 0;
  double radius_ = 1.0;
};

struct TransversalityResult {
  double residual = 0.0;        // from exact derivatives
  double fd_residual = 0.0;     // same with central differences
  double fd_discrepancy = 0.0;  // max |exact - central difference| derivative entry
};

/// max over alpha < beta of ||d Phi^{(a,b)} - d Phi^{(a,a+1)} Phi^{(a+1,b)}||_F.
double transversality_defect(const HodgeNumbers& hn, const Mat& phi, const Mat& dphi);

TransversalityResult transversality_residual(const Context& ctx, const HorizontalFamily& family,
                                             std::span<const cplx> z, int mu);
TransversalityResult transversality_residual(const Context& ctx, const SampledCurve& curve, double t);

/// Full differential d Phi(e_mu) Phi^{-1} restricted to the graded quotients,
/// compared with the superdiagonal blocks of d Phi; returns the largest gap.
double differential_quotient_gap(const Context& ctx, const HorizontalFamily& family,
                                 std::span<const cplx> z, int mu);

struct BoundednessReport {
  LengthReport lengths;
  /// sup over samples of ||Phi^{(a,b)}||_F, indexed [a][b].
  std::vector<std::vector<double>> block_sup;
  double sup_all = 0.0;
  /// (M/m) times the l1 Hodge lower bound.
  double k_bound = 0.0;
  /// chain_bound[a][b]: ||Phi^{(a,a+1)}|| <= int ||Phi'^{(a,a+1)}|| and
  /// ||Phi^{(a,b)}|| <= sup||Phi^{(a+1,b)}|| int ||Phi'^{(a,a+1)}|| for b > a+1.
  std::vector<std::vector<double>> chain_bound;
  double c_prime = 0.0;
  double horizontality = 0.0;
  bool all_in_nplus = true;
  bool chain_ok = false;
  bool superdiagonal_ok = false;  // int sum ||Phi'^{(a,a+1)}|| <= (M/m) l1 bound
  bool block_bound_ok = false;    // sup_all <= k_bound (1 + c_prime)
  bool theorem1_consistent = false;
};

/// Curve must start at the base point. Throws NotHorizontal.
BoundednessReport boundedness_experiment(const Context& ctx, const SampledCurve& curve);

/// Last sample index keeps hr2 margin above floor; curve cut just before the
/// first sample that does not.
SampledCurve restrict_to_domain(const Context& ctx, const SampledCurve& curve, double margin_floor);

}  // namespace hodge
