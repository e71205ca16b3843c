#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hodge {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RowVec = Eigen::RowVectorXcd;
using RMat = Eigen::MatrixXd;

inline constexpr cplx kI{0.0, 1.0};

/// i^k for any integer k, exact.
inline cplx ipow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

enum class ErrorKind {
  InvalidHodgeNumbers,
  SymmetryMismatch,
  HodgeRiemannViolation,
  RealityViolation,
  Singular,
  DegenerateIntersection,
  NotNilpotent,
  NotUnipotent,
  NotInNPlus,
  NonScalarGram,
  ShapeMismatch,
  SampleOutsideChart,
  QuadratureNotConverged,
  NotHorizontalGenerator,
  NotHorizontal,
  StepTooLarge,
  LeftChart,
  NotAbelian,
  RankDrop,
  LevelTooSmall,
  NotCongruentToIdentity,
  ParseError,
  JobError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the toolkit. `index` carries the block index,
/// sample index, or grid index that failed (-1 when not applicable) and
/// `value` a margin or residual when one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string what, int index = -1, double value = 0.0)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind), index_(index), value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  int index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  int index_;
  double value_;
};

/// Tolerance table shared by every module; scenarios may override entries.
struct Tolerances {
  double minor = 1e-9;        // Hadamard-normalized leading minors
  double identity = 1e-12;    // identities and round trips
  double residual = 1e-8;     // Lie/transversality/horizontality residuals
  double quadrature = 1e-6;   // length integrals
  double rank = 1e-9;         // relative singular-value cut for nullspaces
};

}  // namespace hodge
