#pragma once

#include <stdexcept>
#include <string>

namespace magflow {

/// Exit-code class of a failure: 1 = invalid input, 2 = numerical failure,
/// 3 = I/O failure.  The CLI maps exceptions to process exit codes with this.
enum class ErrorClass { Validation = 1, Numerical = 2, Io = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

struct ValidationError : Error {
  explicit ValidationError(const std::string& what) : Error(ErrorClass::Validation, what) {}
};

struct ParseError : Error {
  ParseError(const std::string& what, long line)
      : Error(ErrorClass::Validation, what + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorClass::Io, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorClass::Numerical, what) {}
};

struct RootFindingFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct WrongCount : NumericalError {
  using NumericalError::NumericalError;
};
struct NotHyperbolic : NumericalError {
  using NumericalError::NumericalError;
};
struct StepTooLarge : NumericalError {
  using NumericalError::NumericalError;
};
struct KernelDimensionUnexpected : NumericalError {
  using NumericalError::NumericalError;
};
struct EpsilonTooLarge : NumericalError {
  using NumericalError::NumericalError;
};
struct NewtonFailure : NumericalError {
  using NumericalError::NumericalError;
};
struct NewtonDivergence : NumericalError {
  using NumericalError::NumericalError;
};
struct NearVerticalCritical : NumericalError {
  using NumericalError::NumericalError;
};
struct SpeedCollision : NumericalError {
  using NumericalError::NumericalError;
};
struct BranchCrossing : NumericalError {
  using NumericalError::NumericalError;
};
struct BlowUp : NumericalError {
  using NumericalError::NumericalError;
};
struct GridTooSmall : ValidationError {
  using ValidationError::ValidationError;
};
struct GridMismatch : ValidationError {
  using ValidationError::ValidationError;
};

}  // namespace magflow
