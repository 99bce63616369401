#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qreflect {

enum class ErrorKind {
  InvalidArgument,
  ParseError,
  OutOfRange,
  DomainError,
  StepLimitExceeded,
  NonFiniteRhs,
  ToleranceNotMet,
  NoInteriorMaximum,
  SeriesNotConverged,
  ClassicallyForbidden,
  NoRealRoot,
  NoReflectionPoint,
  DegenerateInterface,
  SlabCountOverflow,
  ThetaPastMax,
  EdgeCutTooLarge,
  CrossCheckFailed,
};

/// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Config, Numerical, Physics };

std::string_view to_string(ErrorKind kind);
std::string_view to_string(ErrorCategory category);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

/// Adaptive quadrature gave up; carries the best estimate it had.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& message, std::complex<double> estimate,
                  double error_estimate)
      : Error(ErrorKind::ToleranceNotMet, message),
        estimate_(estimate),
        error_estimate_(error_estimate) {}

  std::complex<double> estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  std::complex<double> estimate_;
  double error_estimate_;
};

}  // namespace qreflect
