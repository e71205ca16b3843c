#include "hodgekit/affine_chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hodgekit/lie_structure.hpp"
#include "hodgekit/linalg.hpp"
#include "hodgekit/quadrature.hpp"

namespace hodge {

namespace {

Mat normalized(const Context& ctx, const Mat& x) {
  const Mat& d = ctx.base_normalizer();
  return d * x * d.inverse();
}

double sigma_ratio(const Mat& a) {
  const Eigen::VectorXd s = linalg::singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0.0;
  if (a.cols() > a.rows()) return 0.0;
  return s(s.size() - 1) / s(0);
}

double margin_or_zero(const Context& ctx, const Mat& frame) {
  try {
    return check_hr2(ctx, frame);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateIntersection) throw;
    return 0.0;
  }
}

// Upper factor R with K = R^* R for the quadratic form a^* K a, K = H^T.
Mat form_factor(const Mat& h) {
  Eigen::LLT<Mat> llt(linalg::hermitian_part(h.transpose()));
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::Singular, "Hodge Gram not definite");
  return llt.matrixL().adjoint();
}

}  // namespace

cplx base_inner(const Context& ctx, const Mat& x, const Mat& y) {
  return (normalized(ctx, x).cwiseProduct(normalized(ctx, y).conjugate())).sum();
}

AbelianSubalgebra make_subalgebra(const Context& ctx, std::vector<Mat> basis) {
  const auto& hn = ctx.hodge();
  AbelianSubalgebra a;
  double scale = 1.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Mat& x = basis[i];
    scale = std::max(scale, max_abs(x));
    const double off = max_abs(x - lie::grade_component(hn, x, -1));
    const double lie = lie::lie_algebra_residual(ctx, x);
    if (std::max(off, lie) > ctx.tol().residual * std::max(1.0, max_abs(x)))
      throw Error(ErrorKind::NotHorizontal, "tangent direction is not in g^{-1,1}",
                  static_cast<int>(i), std::max(off, lie));
  }
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const double br = max_abs(lie::bracket(basis[i], basis[j]));
      if (br > 1e-10 * scale * scale)
        throw Error(ErrorKind::NotAbelian, "tangent directions do not commute",
                    static_cast<int>(i), br);
    }
  const auto n = static_cast<Eigen::Index>(basis.size());
  a.gram = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a.gram(i, j) = base_inner(ctx, basis[j], basis[i]);
  if (n > 0 && linalg::numerical_rank(a.gram, 1e-12) < n)
    throw Error(ErrorKind::RankDrop, "tangent directions are linearly dependent");
  for (const auto& x : basis) {
    Mat v = x;
    for (const auto& e : a.orthonormal) v -= base_inner(ctx, v, e) * e;
    v /= std::sqrt(base_inner(ctx, v, v).real());
    a.orthonormal.push_back(v);
  }
  a.basis = std::move(basis);
  return a;
}

AbelianSubalgebra tangent_subalgebra(const Context& ctx, const HorizontalFamily& family) {
  std::vector<cplx> zero(family.dimension(), 0.0);
  const Mat id = Mat::Identity(ctx.dim(), ctx.dim());
  std::vector<Mat> basis;
  for (int mu = 0; mu < family.dimension(); ++mu) {
    DualMat d = family.derivative(zero, mu);
    if (max_abs(d.v - id) > 1e-12)
      throw Error(ErrorKind::ShapeMismatch, "family does not pass through the base point");
    basis.push_back(d.d);
  }
  return make_subalgebra(ctx, std::move(basis));
}

Vec project_coefficients(const Context& ctx, const AbelianSubalgebra& a, const Mat& y) {
  const auto n = static_cast<Eigen::Index>(a.basis.size());
  Vec b(n);
  for (Eigen::Index i = 0; i < n; ++i) b(i) = base_inner(ctx, y, a.basis[i]);
  return a.gram.fullPivLu().solve(b);
}

Mat point_of_coefficients(const Context& ctx, const AbelianSubalgebra& a, const Vec& c) {
  Mat x = Mat::Zero(ctx.dim(), ctx.dim());
  for (std::size_t j = 0; j < a.basis.size(); ++j) x += c(static_cast<Eigen::Index>(j)) * a.basis[j];
  return lie::nilpotent_exp(ctx.hodge(), x);
}

Projection project_P(const Context& ctx, const AbelianSubalgebra& a, const NPlusCoords& x) {
  const Mat y = lie::nilpotent_log(ctx.hodge(), x.phi);
  Projection p;
  p.coefficients = project_coefficients(ctx, a, y);
  p.point = NPlusCoords{point_of_coefficients(ctx, a, p.coefficients)};
  return p;
}

PsiReport psi(const Context& ctx, const AbelianSubalgebra& a, const HorizontalFamily& family,
              std::span<const cplx> z) {
  const auto& hn = ctx.hodge();
  const int N = family.dimension();
  const int na = a.dim();
  PsiReport r;
  r.dpsi = Mat::Zero(na, N);
  std::vector<Mat> dphi;
  Mat phi;
  for (int mu = 0; mu < N; ++mu) {
    const DualMat d = family.derivative(z, mu);
    const DualMat y = lie::nilpotent_log(hn, d);
    if (mu == 0) {
      phi = d.v;
      r.psi = project_coefficients(ctx, a, y.v);
    }
    r.dpsi.col(mu) = project_coefficients(ctx, a, y.d);
    dphi.push_back(d.d);
  }
  if (N == 0) {
    phi = family.value(z);
    r.psi = project_coefficients(ctx, a, lie::nilpotent_log(hn, phi));
  }
  r.rank = linalg::numerical_rank(r.dpsi, ctx.tol().rank);

  const Mat image = point_of_coefficients(ctx, a, r.psi);
  r.hr2_margin = margin_or_zero(ctx, image * ctx.base());
  r.in_D = r.hr2_margin > 0.0;
  const double dmargin = margin_or_zero(ctx, phi * ctx.base());
  r.domain_in_D = dmargin > 0.0;

  if (!(r.in_D && r.domain_in_D) || N == 0 || na == 0) {
    r.isometry_defect = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const GramData gd = gram_blocks(ctx, phi * ctx.base());
  const GramData ga = gram_blocks(ctx, image * ctx.base());
  std::vector<HorizontalTangent> vd, va;
  for (int mu = 0; mu < N; ++mu) vd.push_back(tangent_of(hn, phi, dphi[mu]));
  for (int i = 0; i < na; ++i) va.push_back(superdiagonal(hn, a.basis[i]));
  Mat hd(N, N), ha(na, na);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) hd(i, j) = horizontal_inner(gd, vd[i], vd[j]);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) ha(i, j) = horizontal_inner(ga, va[i], va[j]);
  try {
    const Mat rd = form_factor(hd);
    const Mat ra = form_factor(ha);
    const Mat m = ra * r.dpsi * rd.inverse();
    const Eigen::VectorXd s = linalg::singular_values(m);
    r.singular_values.assign(s.data(), s.data() + s.size());
    double defect = 0.0;
    for (int mu = 0; mu < N; ++mu) {
      const double num = (ra * r.dpsi.col(mu)).norm();
      const double den = rd.col(mu).norm();
      defect = std::max(defect, std::abs(num / den - 1.0));
    }
    r.isometry_defect = defect;
  } catch (const Error&) {
    r.isometry_defect = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<std::vector<cplx>> polydisc_grid(int dimension, double radius, int points_per_axis) {
  const int axes = 2 * dimension;
  std::vector<double> ticks(points_per_axis, 0.0);
  const double half = radius / std::sqrt(2.0);
  for (int i = 0; i < points_per_axis && points_per_axis > 1; ++i)
    ticks[i] = -half + 2.0 * half * i / (points_per_axis - 1);
  std::size_t total = 1;
  for (int k = 0; k < axes; ++k) total *= static_cast<std::size_t>(points_per_axis);
  std::vector<std::vector<cplx>> grid;
  grid.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> coord(axes);
    std::size_t rest = idx;
    for (int k = axes - 1; k >= 0; --k) {
      coord[k] = ticks[rest % points_per_axis];
      rest /= points_per_axis;
    }
    std::vector<cplx> z(dimension);
    for (int mu = 0; mu < dimension; ++mu) z[mu] = cplx(coord[2 * mu], coord[2 * mu + 1]);
    grid.push_back(std::move(z));
  }
  return grid;
}

SubbundleSpec parse_subbundle(const std::string& name) {
  if (name == "first-piece") return SubbundleSpec::FirstPiece;
  throw Error(ErrorKind::ParseError, "unknown subbundle spec '" + name + "'");
}

std::string to_string(SubbundleSpec) { return "first-piece"; }

TorelliReport strong_torelli_check(const Context& ctx, const HorizontalFamily& family,
                                   SubbundleSpec, const std::vector<std::vector<cplx>>& grid) {
  const auto& hn = ctx.hodge();
  const int n = hn.weight();
  const int N = family.dimension();
  TorelliReport rep;
  rep.subbundle_dim = n >= 1 ? hn.block_size(0) * hn.block_size(1) : 0;
  rep.worst_rank_margin = std::numeric_limits<double>::infinity();
  rep.worst_image_margin = std::numeric_limits<double>::infinity();
  if (rep.subbundle_dim != N)
    throw Error(ErrorKind::RankDrop, "subbundle rank differs from the family dimension", -1,
                static_cast<double>(rep.subbundle_dim));
  int total = 0;
  for (int a = 0; a < n; ++a) total += hn.block_size(a) * hn.block_size(a + 1);
  const int first = rep.subbundle_dim;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    Mat full(total, N);
    Mat phi;
    for (int mu = 0; mu < N; ++mu) {
      const DualMat d = family.derivative(grid[g], mu);
      phi = d.v;
      const HorizontalTangent v = tangent_of(hn, d.v, d.d);
      Eigen::Index off = 0;
      for (const auto& blk : v.v) {
        full.block(off, mu, blk.size(), 1) = blk.reshaped();
        off += blk.size();
      }
    }
    const double rank_margin = sigma_ratio(full);
    const double image_margin = sigma_ratio(full.topRows(first));
    if (rank_margin < rep.worst_rank_margin) rep.worst_rank_margin = rank_margin;
    if (image_margin < rep.worst_image_margin) {
      rep.worst_image_margin = image_margin;
      rep.worst_index = static_cast<int>(g);
    }
    if (!(rank_margin > 1e-8) || !(image_margin > 1e-8))
      throw Error(ErrorKind::RankDrop, "differential loses rank on the subbundle",
                  static_cast<int>(g), std::min(rank_margin, image_margin));
    ++rep.points;
  }
  rep.holds = true;
  return rep;
}

CompletenessReport completeness_probe(const Context& ctx, const AbelianSubalgebra& a, const Mat& x,
                                      double t_max, int samples, double margin_floor,
                                      double length_threshold) {
  const auto& hn = ctx.hodge();
  if (samples < 2) throw Error(ErrorKind::ShapeMismatch, "need at least two samples");
  (void)a;
  CompletenessReport rep;
  auto frame_at = [&](double t) -> Mat { return lie::nilpotent_exp(hn, cplx(t) * x) * ctx.base(); };
  auto margin = [&](double t) { return margin_or_zero(ctx, frame_at(t)); };
  const HorizontalTangent v = superdiagonal(hn, x);
  auto speed = [&](double t) -> Eigen::VectorXd {
    const GramData g = gram_blocks(ctx, frame_at(t));
    if (!(g.min_eigenvalue > 0.0))
      throw Error(ErrorKind::SampleOutsideChart, "ray sample outside D", -1, t);
    Eigen::VectorXd out(1);
    out(0) = hn.weight() > 0 ? horizontal_norm(ctx, g, v, NormMode::HilbertSchmidt) : 0.0;
    return out;
  };
  auto bisect = [&](double lo, double hi, double level) {
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (margin(mid) > level) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  // golden section for the smallest margin in [lo, hi]
  auto argmin = [&](double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - r * (hi - lo), d = lo + r * (hi - lo);
    double fc = margin(c), fd = margin(d);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      if (fc < fd) {
        hi = d, d = c, fd = fc;
        c = hi - r * (hi - lo), fc = margin(c);
      } else {
        lo = c, c = d, fc = fd;
        d = lo + r * (hi - lo), fd = margin(d);
      }
    }
    return 0.5 * (lo + hi);
  };

  for (int i = 0; i < samples; ++i) {
    rep.t.push_back(t_max * i / (samples - 1));
    rep.margin.push_back(margin(rep.t.back()));
  }
  const double scale = std::max(1.0, std::abs(rep.margin.front()));

  // Exit is either a sign change of the margin or a tangential touch of the
  // boundary (a local minimum that refines to zero); even weight D can have
  // two components and a ray may pass through the boundary into the other.
  int last_inside = samples - 1;
  for (int i = 1; i < samples && !rep.exited; ++i) {
    if (rep.margin[i] <= 0.0) {
      rep.exited = true;
      rep.t_exit = bisect(rep.t[i - 1], rep.t[i], 0.0);
      last_inside = i - 1;
    } else if (i + 1 < samples && rep.margin[i] < rep.margin[i - 1] &&
               rep.margin[i] < rep.margin[i + 1]) {
      double tm = argmin(rep.t[i - 1], rep.t[i + 1]);
      const double mm = margin(tm);
      if (mm <= 0.0) {
        // near a touch the pieces stop spanning H on a small interval; take its midpoint
        double lo = rep.t[i - 1], hi = tm;
        lo = bisect(lo, hi, 0.0);
        double a2 = tm, b2 = rep.t[i + 1];
        for (int it = 0; it < 200 && b2 - a2 > 1e-14; ++it) {
          const double mid = 0.5 * (a2 + b2);
          if (margin(mid) > 0.0) b2 = mid; else a2 = mid;
        }
        tm = 0.5 * (lo + 0.5 * (a2 + b2));
      }
      if (mm <= 1e-10 * scale) {
        rep.exited = true;
        rep.t_exit = tm;
        last_inside = tm > rep.t[i] ? i : i - 1;
      }
    }
  }

  double cum = 0.0;
  rep.length.push_back(0.0);
  for (int i = 1; i < samples; ++i) {
    if (i > last_inside) {
      rep.length.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    cum += quad::integrate(speed, {rep.t[i - 1], rep.t[i]}, ctx.tol().quadrature).value(0);
    if (rep.margin[i] > rep.margin[i - 1] + 1e-12 * scale) rep.margin_decreasing = false;
    if (cum < rep.length.back()) rep.length_increasing = false;
    rep.length.push_back(cum);
  }

  int floor_idx = -1;
  for (int i = 0; i <= last_inside; ++i)
    if (rep.margin[i] <= margin_floor) {
      floor_idx = i;
      break;
    }
  double lo = 0.0, hi = 0.0;
  int before = -1;
  if (floor_idx > 0) {
    lo = rep.t[floor_idx - 1], hi = rep.t[floor_idx], before = floor_idx - 1;
  } else if (floor_idx < 0 && rep.exited) {
    lo = rep.t[last_inside], hi = rep.t_exit, before = last_inside;
  }
  if (before >= 0) {
    rep.t_floor = bisect(lo, hi, margin_floor);
    std::vector<double> br(rep.t.begin(), rep.t.begin() + before + 1);
    if (rep.t_floor > br.back()) br.push_back(rep.t_floor);
    rep.length_at_floor =
        br.size() > 1 ? quad::integrate(speed, br, ctx.tol().quadrature).value(0) : 0.0;
    rep.diverges = rep.length_at_floor > length_threshold;
  } else {
    rep.t_floor = std::numeric_limits<double>::quiet_NaN();
    rep.length_at_floor = cum;
  }
  return rep;
}

}  // namespace hodge
