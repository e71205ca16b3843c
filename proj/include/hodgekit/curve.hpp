#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hodgekit/nplus_chart.hpp"

namespace hodge {

struct CurvePoint {
  double t = 0.0;
  Mat frame;
  NPlusCoords phi;
  Mat phi_dot;  // dPhi/dt in base coordinates
};

/// Discretized curve t -> Phi(t) eta. `evaluator`, when set, gives the dense
/// curve between samples; otherwise cubic Hermite interpolation of the
/// samples is used.
struct SampledCurve {
  std::vector<CurvePoint> samples;
  double step = 0.0;
  std::string generator;
  std::function<CurvePoint(double)> evaluator;

  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }

  CurvePoint evaluate(const Context& ctx, double t) const;
};

CurvePoint make_point(const Context& ctx, double t, Mat phi, Mat phi_dot);

/// Cubic Hermite interpolation between the bracketing samples.
CurvePoint hermite_point(const Context& ctx, const SampledCurve& curve, double t);

/// Copy of the curve truncated to [t_begin, t] with the evaluator kept.
SampledCurve truncate(const Context& ctx, const SampledCurve& curve, double t);

}  // namespace hodge
