#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gltforge {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorKind {
  InvalidArgument,
  SizeMismatch,
  PathThroughBranchPoint,
  NonChainingCycle,
  OpenCycle,
  QuadratureNotConverged,
  NewtonDivergence,
  DegenerateConstraint,
  DomainBoundary,
  SingularBlock,
  StencilFailure,
  Config,
};

const char* to_string(ErrorKind kind);

/// Error carrying a machine-readable kind. All library failures throw this.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gltforge
