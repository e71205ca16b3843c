#pragma once

// Forward-mode dual numbers over the complex scalars and over complex
// matrices. Holomorphic maps built from +, - and * propagate exact
// complex derivatives: f(z + eps) = f(z) + f'(z) eps with eps^2 = 0.

#include "hodgekit/types.hpp"

namespace hodge {

struct Dual {
  cplx v{};
  cplx d{};

  static Dual constant(cplx c) { return {c, 0.0}; }
  static Dual variable(cplx c) { return {c, 1.0}; }
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator*(cplx a, Dual b) { return {a * b.v, a * b.d}; }
inline Dual operator/(Dual a, cplx b) { return {a.v / b, a.d / b}; }

inline Dual pow(Dual a, int k) {
  Dual r = Dual::constant(1.0);
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

struct DualMat {
  Mat v;
  Mat d;

  static DualMat constant(const Mat& m) { return {m, Mat::Zero(m.rows(), m.cols())}; }
  static DualMat identity(Eigen::Index n) { return constant(Mat::Identity(n, n)); }
  static DualMat zero(Eigen::Index r, Eigen::Index c) {
    return {Mat::Zero(r, c), Mat::Zero(r, c)};
  }

  Eigen::Index rows() const { return v.rows(); }
  Eigen::Index cols() const { return v.cols(); }

  DualMat& operator+=(const DualMat& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
};

inline DualMat operator+(const DualMat& a, const DualMat& b) { return {a.v + b.v, a.d + b.d}; }
inline DualMat operator-(const DualMat& a, const DualMat& b) { return {a.v - b.v, a.d - b.d}; }
inline DualMat operator*(const DualMat& a, const DualMat& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d};
}
inline DualMat operator*(cplx s, const DualMat& a) { return {s * a.v, s * a.d}; }
inline DualMat operator*(double s, const DualMat& a) { return {s * a.v, s * a.d}; }
inline DualMat operator*(Dual s, const DualMat& a) { return {s.v * a.v, s.d * a.v + s.v * a.d}; }

}  // namespace hodge
