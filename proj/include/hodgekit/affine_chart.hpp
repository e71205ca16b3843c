#pragma once

#include <string>
#include <vector>

#include "hodgekit/horizontal_dynamics.hpp"

namespace hodge {

/// Base-point inner product on n_+: Frobenius product of D X D^{-1}, where D
/// Q~-orthonormalizes the base frame blocks.
cplx base_inner(const Context& ctx, const Mat& x, const Mat& y);

struct AbelianSubalgebra {
  std::vector<Mat> basis;
  std::vector<Mat> orthonormal;  // Gram-Schmidt copy under base_inner
  Mat gram;                      // gram(i, j) = base_inner(basis[j], basis[i])
  int dim() const { return static_cast<int>(basis.size()); }
};

/// Checks abelian and g^{-1,1} invariants. Throws NotAbelian, NotHorizontal.
AbelianSubalgebra make_subalgebra(const Context& ctx, std::vector<Mat> basis);

/// Span of d Phi / d z_mu at z = 0.
AbelianSubalgebra tangent_subalgebra(const Context& ctx, const HorizontalFamily& family);

/// Coefficients c with sum c_j X_j the base-orthogonal projection of y onto a.
Vec project_coefficients(const Context& ctx, const AbelianSubalgebra& a, const Mat& y);

struct Projection {
  NPlusCoords point;
  Vec coefficients;
};

/// P = exp o p o log on N_+.
Projection project_P(const Context& ctx, const AbelianSubalgebra& a, const NPlusCoords& x);

/// exp(sum c_j X_j).
Mat point_of_coefficients(const Context& ctx, const AbelianSubalgebra& a, const Vec& c);

struct PsiReport {
  Vec psi;
  Mat dpsi;  // column mu = d psi / d z_mu
  int rank = 0;
  std::vector<double> singular_values;  // of dPsi in Hodge-orthonormal bases
  double isometry_defect = 0.0;         // max_mu | ||dPsi e_mu|| / ||dPhi e_mu|| - 1 |
  bool in_D = false;
  double hr2_margin = 0.0;
  bool domain_in_D = false;  // Phi(z) itself
};

PsiReport psi(const Context& ctx, const AbelianSubalgebra& a, const HorizontalFamily& family,
              std::span<const cplx> z);

/// Tensor grid over the real and imaginary parts of every coordinate,
/// |Re|, |Im| <= radius / sqrt(2), so every point lies in the polydisc.
std::vector<std::vector<cplx>> polydisc_grid(int dimension, double radius, int points_per_axis = 10);

enum class SubbundleSpec { FirstPiece };
SubbundleSpec parse_subbundle(const std::string& name);
std::string to_string(SubbundleSpec spec);

struct TorelliReport {
  bool holds = false;
  int points = 0;
  int subbundle_dim = 0;
  double worst_rank_margin = 0.0;   // min sigma_min / sigma_max of dPhi
  double worst_image_margin = 0.0;  // min sigma_min / sigma_max of dPhi projected to the subbundle
  int worst_index = -1;
};

/// dPhi injective with image projecting isomorphically onto the fibre of the
/// subbundle at every grid point. Throws RankDrop at the first failing point.
TorelliReport strong_torelli_check(const Context& ctx, const HorizontalFamily& family,
                                   SubbundleSpec spec, const std::vector<std::vector<cplx>>& grid);

struct CompletenessReport {
  std::vector<double> t, margin, length;
  bool exited = false;
  double t_exit = 0.0;
  double t_floor = 0.0;           // where the margin reaches margin_floor
  double length_at_floor = 0.0;
  bool diverges = false;          // length_at_floor > length_threshold
  bool margin_decreasing = true;
  bool length_increasing = true;
};

/// Ray exp(tX) o for t in [0, t_max].
CompletenessReport completeness_probe(const Context& ctx, const AbelianSubalgebra& a, const Mat& x,
                                      double t_max, int samples, double margin_floor = 1e-3,
                                      double length_threshold = 3.0);

}  // namespace hodge
