#include "hodgekit/curve.hpp"

#include <algorithm>

namespace hodge {

CurvePoint make_point(const Context& ctx, double t, Mat phi, Mat phi_dot) {
  CurvePoint p;
  p.t = t;
  p.frame = phi * ctx.base();
  p.phi = NPlusCoords{std::move(phi)};
  p.phi_dot = std::move(phi_dot);
  return p;
}

CurvePoint hermite_point(const Context& ctx, const SampledCurve& curve, double t) {
  const auto& s = curve.samples;
  if (s.empty()) throw Error(ErrorKind::ShapeMismatch, "empty curve");
  if (s.size() == 1) return s.front();
  auto it = std::upper_bound(s.begin(), s.end(), t,
                             [](double v, const CurvePoint& p) { return v < p.t; });
  std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
  i = std::min(i, s.size() - 2);
  const auto& p0 = s[i];
  const auto& p1 = s[i + 1];
  const double h = p1.t - p0.t;
  const double u = (t - p0.t) / h;
  const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
  const double d00 = (6 * u * u - 6 * u) / h, d10 = 3 * u * u - 4 * u + 1;
  const double d01 = (-6 * u * u + 6 * u) / h, d11 = 3 * u * u - 2 * u;
  Mat phi = h00 * p0.phi.phi + (h10 * h) * p0.phi_dot + h01 * p1.phi.phi + (h11 * h) * p1.phi_dot;
  Mat dphi = d00 * p0.phi.phi + d10 * p0.phi_dot + d01 * p1.phi.phi + d11 * p1.phi_dot;
  return make_point(ctx, t, std::move(phi), std::move(dphi));
}

CurvePoint SampledCurve::evaluate(const Context& ctx, double t) const {
  if (evaluator) return evaluator(t);
  return hermite_point(ctx, *this, t);
}

SampledCurve truncate(const Context& ctx, const SampledCurve& curve, double t) {
  SampledCurve out;
  out.step = curve.step;
  out.generator = curve.generator;
  out.evaluator = curve.evaluator;
  for (const auto& p : curve.samples) {
    if (p.t < t) out.samples.push_back(p);
  }
  if (out.samples.empty() || out.samples.back().t < t) out.samples.push_back(curve.evaluate(ctx, t));
  return out;
}

}  // namespace hodge
