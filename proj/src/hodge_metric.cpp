#include "hodgekit/hodge_metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hodgekit/linalg.hpp"
#include "hodgekit/quadrature.hpp"

namespace hodge {

GramData gram_data_from(std::vector<Mat> grams) {
  GramData g;
  g.grams = std::move(grams);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& m : g.grams) {
    lo = std::min(lo, linalg::min_eigenvalue(m));
    hi = std::max(hi, linalg::max_eigenvalue(m));
  }
  g.min_eigenvalue = lo;
  g.m_bound = std::sqrt(std::max(lo, 0.0));
  g.M_bound = std::sqrt(std::max(hi, 0.0));
  return g;
}

GramData gram_blocks(const Context& ctx, const Mat& frame) {
  return gram_data_from(hodge_grams(ctx, decomposition_from_filtration(ctx, frame)));
}

HorizontalTangent superdiagonal(const HodgeNumbers& hn, const Mat& x) {
  HorizontalTangent v;
  for (int a = 0; a < hn.weight(); ++a) v.v.push_back(block(x, hn, a, a + 1));
  return v;
}

HorizontalTangent tangent_of(const HodgeNumbers& hn, const Mat& phi, const Mat& phi_dot) {
  Mat x = phi.transpose().partialPivLu().solve(phi_dot.transpose()).transpose();
  return superdiagonal(hn, x);
}

namespace {

void check_shapes(const Context& ctx, const GramData& g, const HorizontalTangent& v) {
  const auto& hn = ctx.hodge();
  if (static_cast<int>(v.v.size()) != hn.weight() ||
      static_cast<int>(g.grams.size()) != hn.weight() + 1)
    throw Error(ErrorKind::ShapeMismatch, "tangent must have one block per graded step");
  for (int a = 0; a < hn.weight(); ++a) {
    if (v.v[a].rows() != hn.block_size(a) || v.v[a].cols() != hn.block_size(a + 1))
      throw Error(ErrorKind::ShapeMismatch, "V_alpha must be d_alpha x d_{alpha+1}", a);
  }
}

double scalar_of(const Mat& g, int index) {
  const double s = g.trace().real() / static_cast<double>(g.rows());
  const Mat dev = g - s * Mat::Identity(g.rows(), g.cols());
  if (max_abs(dev) > 1e-10 * std::max(1.0, std::abs(s)))
    throw Error(ErrorKind::NonScalarGram, "scalar_l1 mode needs scalar Gram matrices", index,
                max_abs(dev));
  return s;
}

}  // namespace

cplx horizontal_inner(const GramData& g, const HorizontalTangent& u, const HorizontalTangent& v) {
  cplx acc = 0.0;
  for (std::size_t a = 0; a < u.v.size(); ++a) {
    Mat left = g.grams[a].ldlt().solve(u.v[a]);
    acc += (left * g.grams[a + 1] * v.v[a].adjoint()).trace();
  }
  return acc;
}

double horizontal_norm(const Context& ctx, const GramData& g, const HorizontalTangent& v,
                       NormMode mode) {
  check_shapes(ctx, g, v);
  if (mode == NormMode::HilbertSchmidt)
    return std::sqrt(std::max(0.0, horizontal_inner(g, v, v).real()));
  double acc = 0.0;
  for (std::size_t a = 0; a < v.v.size(); ++a) {
    const double ga = scalar_of(g.grams[a], static_cast<int>(a));
    const double gb = scalar_of(g.grams[a + 1], static_cast<int>(a + 1));
    acc += v.v[a].norm() * std::sqrt(gb / ga);
  }
  return acc;
}

double horizontal_norm(const Context& ctx, const Mat& frame, const HorizontalTangent& v,
                       NormMode mode) {
  return horizontal_norm(ctx, gram_blocks(ctx, frame), v, mode);
}

double l1_lower_integrand(const GramData& g, const HorizontalTangent& v) {
  double acc = 0.0;
  for (std::size_t a = 0; a < v.v.size(); ++a) {
    const double lo = linalg::min_eigenvalue(g.grams[a + 1]);
    const double hi = linalg::max_eigenvalue(g.grams[a]);
    acc += v.v[a].norm() * std::sqrt(lo / hi);
  }
  return acc;
}

double euclidean_speed(const Mat& phi_dot) { return phi_dot.norm(); }

LengthReport curve_lengths(const Context& ctx, const SampledCurve& curve) {
  return curve_lengths(ctx, curve, ctx.tol().quadrature);
}

LengthReport curve_lengths(const Context& ctx, const SampledCurve& curve, double tol) {
  const auto& hn = ctx.hodge();
  const int n = hn.weight();
  LengthReport rep;
  rep.superdiagonal_lengths.assign(n, 0.0);
  if (curve.samples.empty()) return rep;

  double m_lo = std::numeric_limits<double>::infinity();
  double M_hi = 0.0;
  auto nearest = [&](double t) {
    int best = 0;
    for (std::size_t i = 0; i < curve.samples.size(); ++i)
      if (std::abs(curve.samples[i].t - t) < std::abs(curve.samples[best].t - t))
        best = static_cast<int>(i);
    return best;
  };

  auto integrand = [&](double t) -> Eigen::VectorXd {
    CurvePoint p = curve.evaluate(ctx, t);
    if (!p.phi.phi.allFinite() || !p.phi_dot.allFinite())
      throw Error(ErrorKind::SampleOutsideChart, "curve left the chart", nearest(t), t);
    GramData g;
    try {
      g = gram_blocks(ctx, p.frame);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateIntersection) throw;
      throw Error(ErrorKind::SampleOutsideChart, "sample on the boundary of D", nearest(t), t);
    }
    if (!(g.min_eigenvalue > 0.0))
      throw Error(ErrorKind::SampleOutsideChart, "sample outside D", nearest(t), t);
    m_lo = std::min(m_lo, g.m_bound);
    M_hi = std::max(M_hi, g.M_bound);
    const HorizontalTangent v = tangent_of(hn, p.phi.phi, p.phi_dot);
    Eigen::VectorXd out(3 + n);
    out(0) = n > 0 ? horizontal_norm(ctx, g, v, NormMode::HilbertSchmidt) : 0.0;
    out(1) = l1_lower_integrand(g, v);
    out(2) = euclidean_speed(p.phi_dot);
    for (int a = 0; a < n; ++a) out(3 + a) = block(p.phi_dot, hn, a, a + 1).norm();
    return out;
  };

  std::vector<double> breaks;
  for (const auto& s : curve.samples) {
    if (breaks.empty() || s.t > breaks.back()) breaks.push_back(s.t);
  }
  for (double t : breaks) integrand(t);
  if (breaks.size() >= 2) {
    const quad::Result r = quad::integrate(integrand, breaks, tol);
    rep.hodge_hs = r.value(0);
    rep.hodge_l1_lowerbound = r.value(1);
    rep.euclidean = r.value(2);
    for (int a = 0; a < n; ++a) {
      rep.superdiagonal_lengths[a] = r.value(3 + a);
      rep.euclidean_superdiagonal += r.value(3 + a);
    }
    rep.error_estimate = r.error;
    rep.evaluations = r.evaluations;
  }
  rep.gram_m = m_lo;
  rep.gram_M = M_hi;
  return rep;
}

}  // namespace hodge
