#include "hodgekit/horizontal_dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "hodgekit/lie_structure.hpp"

namespace hodge {

Mat MatrixPolynomial::operator()(cplx t) const {
  if (coefficients.empty()) throw Error(ErrorKind::ShapeMismatch, "empty polynomial");
  Mat r = coefficients.back();
  for (int j = degree() - 1; j >= 0; --j) r = t * r + coefficients[j];
  return r;
}

DualMat MatrixPolynomial::operator()(const Dual& t) const {
  if (coefficients.empty()) throw Error(ErrorKind::ShapeMismatch, "empty polynomial");
  DualMat r = DualMat::constant(coefficients.back());
  for (int j = degree() - 1; j >= 0; --j) r = t * r + DualMat::constant(coefficients[j]);
  return r;
}

void require_horizontal_generator(const Context& ctx, const Mat& x) {
  const auto& hn = ctx.hodge();
  if (x.rows() != hn.dim() || x.cols() != hn.dim())
    throw Error(ErrorKind::ShapeMismatch, "generator must be m x m");
  const double scale = std::max(1.0, max_abs(x));
  const double lie = lie::lie_algebra_residual(ctx, x);
  const double off = max_abs(x - lie::grade_component(hn, x, -1));
  if (lie > ctx.tol().residual * scale || off > ctx.tol().residual * scale)
    throw Error(ErrorKind::NotHorizontalGenerator, "generator is not in g^{-1,1}", -1,
                std::max(lie, off));
}

double horizontality_residual(const HodgeNumbers& hn, const Mat& phi, const Mat& phi_dot) {
  Mat x = phi.transpose().partialPivLu().solve(phi_dot.transpose()).transpose();
  return max_abs(x - lie::grade_component(hn, x, -1));
}

double horizontality_residual(const Context& ctx, const SampledCurve& curve) {
  const auto& hn = ctx.hodge();
  double r = 0.0;
  for (const auto& p : curve.samples)
    r = std::max(r, horizontality_residual(hn, p.phi.phi, p.phi_dot));
  for (std::size_t i = 0; i + 1 < curve.samples.size(); ++i) {
    const double a = curve.samples[i].t, b = curve.samples[i + 1].t;
    const double t = 0.5 * (a + b);
    const double h = std::min(1e-3, (b - a) / 8.0);
    auto ph = [&](double s) { return curve.evaluate(ctx, s).phi.phi; };
    Mat d = (-ph(t + 2 * h) + 8.0 * ph(t + h) - 8.0 * ph(t - h) + ph(t - 2 * h)) / (12.0 * h);
    r = std::max(r, horizontality_residual(hn, ph(t), d));
  }
  return r;
}

SampledCurve one_parameter_orbit(const Context& ctx, const Mat& x, const std::vector<double>& t_grid) {
  require_horizontal_generator(ctx, x);
  const auto& hn = ctx.hodge();
  const Mat xs = lie::grade_component(hn, x, -1);
  SampledCurve c;
  c.generator = "orbit";
  c.evaluator = [ctx, xs](double t) {
    Mat phi = lie::nilpotent_exp(ctx.hodge(), cplx(t) * xs);
    Mat dphi = xs * phi;
    return make_point(ctx, t, std::move(phi), std::move(dphi));
  };
  for (double t : t_grid) c.samples.push_back(c.evaluator(t));
  if (t_grid.size() >= 2) c.step = (t_grid.back() - t_grid.front()) / (t_grid.size() - 1);
  return c;
}

namespace {

Mat rk4_step(const MatrixPolynomial& xi, double t, const Mat& phi, double h) {
  const Mat k1 = xi(t) * phi;
  const Mat k2 = xi(t + 0.5 * h) * (phi + (0.5 * h) * k1);
  const Mat k3 = xi(t + 0.5 * h) * (phi + (0.5 * h) * k2);
  const Mat k4 = xi(t + h) * (phi + h * k3);
  return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

SampledCurve develop(const Context& ctx, const MatrixPolynomial& xi, double t_end, int steps) {
  if (steps < 1) throw Error(ErrorKind::ShapeMismatch, "steps must be positive");
  for (const auto& c : xi.coefficients) require_horizontal_generator(ctx, c);
  const auto& hn = ctx.hodge();
  const int m = hn.dim();
  const double h = t_end / steps;

  SampledCurve c;
  c.generator = "development";
  c.step = h;
  Mat phi = Mat::Identity(m, m);
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    if (i > 0) phi = rk4_step(xi, t - h, phi, h);
    if (!phi.allFinite() || lie::unipotent_defect(hn, phi) > 1e-10 * std::max(1.0, max_abs(phi)))
      throw Error(ErrorKind::LeftChart, "sample left N_+", i, t);
    c.samples.push_back(make_point(ctx, t, phi, xi(t) * phi));
  }
  auto samples = std::make_shared<std::vector<CurvePoint>>(c.samples);
  c.evaluator = [ctx, xi, samples, h](double t) {
    const auto& s = *samples;
    auto k = static_cast<std::ptrdiff_t>(std::floor(t / h));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(s.size()) - 1);
    const CurvePoint& left = s[static_cast<std::size_t>(k)];
    const double dt = t - left.t;
    Mat p = dt == 0.0 ? left.phi.phi : rk4_step(xi, left.t, left.phi.phi, dt);
    Mat dp = xi(t) * p;
    return make_point(ctx, t, std::move(p), std::move(dp));
  };

  double scale = 1.0;
  for (const auto& p : c.samples) scale = std::max(scale, max_abs(p.phi_dot));
  const double res = horizontality_residual(ctx, c);
  if (res > ctx.tol().residual * scale)
    throw Error(ErrorKind::StepTooLarge, "dense output is not horizontal", -1, res);
  return c;
}

// ---- families -------------------------------------------------------------

namespace {

double max_bracket(const std::vector<Mat>& g) {
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) r = std::max(r, max_abs(lie::bracket(g[i], g[j])));
  return r;
}

Mat ray_value(const MatrixPolynomial& xi, cplx z, int steps, Eigen::Index m) {
  Mat phi = Mat::Identity(m, m);
  const double h = 1.0 / steps;
  auto f = [&](double s, const Mat& p) -> Mat { return (z * xi(s * z)) * p; };
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    const Mat k1 = f(s, phi);
    const Mat k2 = f(s + 0.5 * h, phi + (0.5 * h) * k1);
    const Mat k3 = f(s + 0.5 * h, phi + (0.5 * h) * k2);
    const Mat k4 = f(s + h, phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

DualMat ray_dual(const MatrixPolynomial& xi, Dual z, int steps, Eigen::Index m) {
  DualMat phi = DualMat::identity(m);
  const double h = 1.0 / steps;
  auto f = [&](double s, const DualMat& p) -> DualMat {
    return (z * xi(cplx(s) * z)) * p;
  };
  for (int i = 0; i < steps; ++i) {
    const double s = i * h;
    const DualMat k1 = f(s, phi);
    const DualMat k2 = f(s + 0.5 * h, phi + (0.5 * h) * k1);
    const DualMat k3 = f(s + 0.5 * h, phi + (0.5 * h) * k2);
    const DualMat k4 = f(s + h, phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

}  // namespace

HorizontalFamily HorizontalFamily::abelian(const Context& ctx, std::vector<Mat> generators,
                                           double radius) {
  for (const auto& g : generators) require_horizontal_generator(ctx, g);
  double scale = 1.0;
  for (const auto& g : generators) scale = std::max(scale, max_abs(g));
  const double br = max_bracket(generators);
  if (br > 1e-10 * scale * scale)
    throw Error(ErrorKind::NotAbelian, "generators do not commute", -1, br);
  HorizontalFamily f(ctx.hodge());
  f.kind_ = Kind::Abelian;
  f.generators_ = std::move(generators);
  f.radius_ = radius;
  return f;
}

HorizontalFamily HorizontalFamily::exponential(const Context& ctx, std::vector<Mat> generators,
                                               double radius) {
  double scale = 1.0;
  for (const auto& g : generators) {
    const double low = lie::lower_part_norm(ctx.hodge(), g);
    if (low > 1e-12 * std::max(1.0, max_abs(g)))
      throw Error(ErrorKind::NotNilpotent, "generator is not strictly block upper", -1, low);
    scale = std::max(scale, max_abs(g));
  }
  const double br = max_bracket(generators);
  if (br > 1e-10 * scale * scale)
    throw Error(ErrorKind::NotAbelian, "generators do not commute", -1, br);
  HorizontalFamily f(ctx.hodge());
  f.kind_ = Kind::Exponential;
  f.generators_ = std::move(generators);
  f.radius_ = radius;
  return f;
}

HorizontalFamily HorizontalFamily::development(const Context& ctx, MatrixPolynomial xi, int steps,
                                               double radius) {
  for (const auto& c : xi.coefficients) require_horizontal_generator(ctx, c);
  if (steps < 1) throw Error(ErrorKind::ShapeMismatch, "steps must be positive");
  HorizontalFamily f(ctx.hodge());
  f.kind_ = Kind::Development;
  f.xi_ = std::move(xi);
  f.steps_ = steps;
  f.radius_ = radius;
  return f;
}

int HorizontalFamily::dimension() const {
  return kind_ == Kind::Development ? 1 : static_cast<int>(generators_.size());
}

Mat HorizontalFamily::value(std::span<const cplx> z) const {
  if (static_cast<int>(z.size()) != dimension())
    throw Error(ErrorKind::ShapeMismatch, "parameter count does not match the family");
  const Eigen::Index m = hn_.dim();
  if (kind_ == Kind::Development) return ray_value(xi_, z[0], steps_, m);
  Mat x = Mat::Zero(m, m);
  for (std::size_t i = 0; i < generators_.size(); ++i) x += z[i] * generators_[i];
  return lie::exp_series<Mat>(x, hn_.weight(), Mat::Identity(m, m));
}

DualMat HorizontalFamily::derivative(std::span<const cplx> z, int mu) const {
  if (static_cast<int>(z.size()) != dimension() || mu < 0 || mu >= dimension())
    throw Error(ErrorKind::ShapeMismatch, "parameter count does not match the family");
  const Eigen::Index m = hn_.dim();
  if (kind_ == Kind::Development) return ray_dual(xi_, Dual::variable(z[0]), steps_, m);
  DualMat x = DualMat::zero(m, m);
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    const Dual c = static_cast<int>(i) == mu ? Dual::variable(z[i]) : Dual::constant(z[i]);
    x += c * DualMat::constant(generators_[i]);
  }
  return lie::nilpotent_exp(hn_, x);
}

// ---- transversality -------------------------------------------------------

double transversality_defect(const HodgeNumbers& hn, const Mat& phi, const Mat& dphi) {
  double r = 0.0;
  const int n = hn.weight();
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      Mat diff = block(dphi, hn, a, b) - block(dphi, hn, a, a + 1) * block(phi, hn, a + 1, b);
      r = std::max(r, diff.norm());
    }
  }
  return r;
}

TransversalityResult transversality_residual(const Context& ctx, const HorizontalFamily& family,
                                             std::span<const cplx> z, int mu) {
  const auto& hn = ctx.hodge();
  const DualMat d = family.derivative(z, mu);
  TransversalityResult r;
  r.residual = transversality_defect(hn, d.v, d.d);
  const double h = 1e-5;
  std::vector<cplx> zp(z.begin(), z.end()), zm(z.begin(), z.end());
  zp[mu] += h;
  zm[mu] -= h;
  const Mat fd = (family.value(zp) - family.value(zm)) / (2.0 * h);
  r.fd_residual = transversality_defect(hn, d.v, fd);
  r.fd_discrepancy = max_abs(fd - d.d);
  return r;
}

TransversalityResult transversality_residual(const Context& ctx, const SampledCurve& curve, double t) {
  const auto& hn = ctx.hodge();
  const CurvePoint p = curve.evaluate(ctx, t);
  TransversalityResult r;
  r.residual = transversality_defect(hn, p.phi.phi, p.phi_dot);
  const double h = 1e-5;
  auto ph = [&](double s) { return curve.evaluate(ctx, s).phi.phi; };
  Mat fd;
  if (t - h < curve.t_begin())
    fd = (-3.0 * ph(t) + 4.0 * ph(t + h) - ph(t + 2 * h)) / (2.0 * h);
  else if (t + h > curve.t_end())
    fd = (3.0 * ph(t) - 4.0 * ph(t - h) + ph(t - 2 * h)) / (2.0 * h);
  else
    fd = (ph(t + h) - ph(t - h)) / (2.0 * h);
  r.fd_residual = transversality_defect(hn, p.phi.phi, fd);
  r.fd_discrepancy = max_abs(fd - p.phi_dot);
  return r;
}

double differential_quotient_gap(const Context& ctx, const HorizontalFamily& family,
                                 std::span<const cplx> z, int mu) {
  const auto& hn = ctx.hodge();
  const DualMat d = family.derivative(z, mu);
  const Mat y = d.v.transpose().partialPivLu().solve(d.d.transpose()).transpose();
  double gap = 0.0;
  for (int a = 0; a < hn.weight(); ++a) {
    gap = std::max(gap, max_abs(block(y, hn, a, a + 1) - block(d.d, hn, a, a + 1)));
    for (int b = a + 2; b <= hn.weight(); ++b) gap = std::max(gap, max_abs(block(y, hn, a, b)));
  }
  return gap;
}

// ---- boundedness ----------------------------------------------------------

BoundednessReport boundedness_experiment(const Context& ctx, const SampledCurve& curve) {
  const auto& hn = ctx.hodge();
  const int n = hn.weight();
  if (curve.samples.empty()) throw Error(ErrorKind::ShapeMismatch, "empty curve");
  const Mat& phi0 = curve.samples.front().phi.phi;
  if (max_abs(phi0 - Mat::Identity(phi0.rows(), phi0.cols())) > 1e-10)
    throw Error(ErrorKind::ShapeMismatch, "curve must start at the base point");

  BoundednessReport rep;
  double scale = 1.0;
  for (const auto& p : curve.samples) scale = std::max(scale, max_abs(p.phi_dot));
  rep.horizontality = horizontality_residual(ctx, curve);
  if (rep.horizontality > ctx.tol().residual * scale)
    throw Error(ErrorKind::NotHorizontal, "curve is not horizontal", -1, rep.horizontality);

  rep.lengths = curve_lengths(ctx, curve);
  rep.block_sup.assign(n + 1, std::vector<double>(n + 1, 0.0));
  for (const auto& p : curve.samples) {
    const auto margins = leading_minor_margins(hn, coefficient_matrix(ctx, p.frame));
    for (double v : margins)
      if (!(v > ctx.tol().minor)) rep.all_in_nplus = false;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b <= n; ++b) {
        const double v = block(p.phi.phi, hn, a, b).norm();
        rep.block_sup[a][b] = std::max(rep.block_sup[a][b], v);
        rep.sup_all = std::max(rep.sup_all, v);
      }
  }

  const auto& L = rep.lengths;
  const double ratio = L.gram_m > 0.0 ? L.gram_M / L.gram_m : 0.0;
  rep.k_bound = ratio * L.hodge_l1_lowerbound;
  const double slack_rel = 10.0 * ctx.tol().quadrature;

  rep.chain_bound.assign(n + 1, std::vector<double>(n + 1, 0.0));
  rep.chain_ok = true;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      const double bound = b == a + 1 ? L.superdiagonal_lengths[a]
                                      : rep.block_sup[a + 1][b] * L.superdiagonal_lengths[a];
      rep.chain_bound[a][b] = bound;
      if (b >= a + 2) rep.c_prime = std::max(rep.c_prime, rep.block_sup[a + 1][b]);
      if (rep.block_sup[a][b] > bound + slack_rel * (1.0 + bound)) rep.chain_ok = false;
    }
  }
  rep.superdiagonal_ok =
      L.euclidean_superdiagonal <= rep.k_bound + slack_rel * (1.0 + rep.k_bound);
  const double full = rep.k_bound * (1.0 + rep.c_prime);
  rep.block_bound_ok = rep.sup_all <= full + slack_rel * (1.0 + full);
  rep.theorem1_consistent =
      rep.chain_ok && rep.superdiagonal_ok && rep.block_bound_ok && rep.all_in_nplus;
  return rep;
}

SampledCurve restrict_to_domain(const Context& ctx, const SampledCurve& curve, double margin_floor) {
  SampledCurve out;
  out.step = curve.step;
  out.generator = curve.generator;
  out.evaluator = curve.evaluator;
  for (const auto& p : curve.samples) {
    double margin = 0.0;
    try {
      margin = check_hr2(ctx, p.frame);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateIntersection) throw;
    }
    if (!(margin > margin_floor)) break;
    out.samples.push_back(p);
  }
  return out;
}

}  // namespace hodge
