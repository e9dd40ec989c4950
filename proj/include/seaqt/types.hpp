#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace seaqt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

enum class ErrorCode {
  NotHermitian,
  TraceDeviation,
  NegativeEigenvalue,
  DimensionMismatch,
  PartitionUndeclared,
  NotIdempotent,
  Infeasible,
  NoConvergence,
  OverflowGuard,
  StepUnderflow,
  NonFinite,
  DegenerateProbeEnsemble,
  SchemaViolation,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

// All failures carry a code plus the measured deviation that triggered them,
// so callers (and the C API) can report quantitative diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, double deviation = 0.0)
      : std::runtime_error(what), code(code), deviation(deviation) {}

  ErrorCode code;
  double deviation;
};

}  // namespace seaqt
