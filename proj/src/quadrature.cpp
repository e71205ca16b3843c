#include "hodgekit/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "hodgekit/types.hpp"

namespace hodge::quad {

namespace {

Rule build_rule(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Eigen::VectorXd apply(const Rule& rule, const Integrand& f, double a, double b, int& evals) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  Eigen::VectorXd acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    Eigen::VectorXd v = f(c + h * rule.nodes[i]);
    ++evals;
    if (acc.size() == 0) acc = Eigen::VectorXd::Zero(v.size());
    acc += rule.weights[i] * v;
  }
  return h * acc;
}

struct Segment {
  double a, b;
  int depth;
};

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

Result integrate(const Integrand& f, const std::vector<double>& breakpoints, double tol,
                 int nodes, int max_depth) {
  const Rule& lo = gauss_legendre(nodes);
  const Rule& hi = gauss_legendre(2 * nodes);
  Result res;
  if (breakpoints.size() < 2) return res;
  const double total = std::abs(breakpoints.back() - breakpoints.front());
  double err = 0.0;
  for (std::size_t s = 0; s + 1 < breakpoints.size(); ++s) {
    // Depth-first so that accepted pieces are summed left to right.
    std::vector<Segment> stack{{breakpoints[s], breakpoints[s + 1], 0}};
    while (!stack.empty()) {
      Segment seg = stack.back();
      stack.pop_back();
      if (seg.b == seg.a) continue;
      Eigen::VectorXd q1 = apply(lo, f, seg.a, seg.b, res.evaluations);
      Eigen::VectorXd q2 = apply(hi, f, seg.a, seg.b, res.evaluations);
      const double share = total > 0.0 ? tol * std::abs(seg.b - seg.a) / total : tol;
      bool ok = true;
      double seg_err = 0.0;
      for (Eigen::Index i = 0; i < q2.size(); ++i) {
        const double e = std::abs(q2(i) - q1(i));
        seg_err = std::max(seg_err, e);
        if (!std::isfinite(q2(i)) || e > std::max(share, tol * std::abs(q2(i)))) ok = false;
      }
      if (ok) {
        if (res.value.size() == 0) res.value = Eigen::VectorXd::Zero(q2.size());
        res.value += q2;
        err += seg_err;
        ++res.segments;
        continue;
      }
      if (seg.depth >= max_depth)
        throw Error(ErrorKind::QuadratureNotConverged, "adaptive quadrature hit depth limit",
                    static_cast<int>(s), seg_err);
      const double mid = 0.5 * (seg.a + seg.b);
      stack.push_back({mid, seg.b, seg.depth + 1});
      stack.push_back({seg.a, mid, seg.depth + 1});
    }
  }
  res.error = err;
  return res;
}

}  // namespace hodge::quad
