#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hodge::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Rule& gauss_legendre(int n);

struct Result {
  Eigen::VectorXd value;
  double error = 0.0;  // sum of accepted |Q_2n - Q_n| estimates, max over components
  int evaluations = 0;
  int segments = 0;
};

using Integrand = std::function<Eigen::VectorXd(double)>;

/// Adaptive composite Gauss-Legendre over the given breakpoints. Each segment
/// is accepted when the n-node and 2n-node rules agree to within
/// max(tol * len / total, tol * |Q_2n|) componentwise, otherwise bisected.
/// Throws QuadratureNotConverged past max_depth bisections.
Result integrate(const Integrand& f, const std::vector<double>& breakpoints, double tol,
                 int nodes = 8, int max_depth = 40);

}  // namespace hodge::quad
