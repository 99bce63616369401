#include "qreflect/error.hpp"

namespace qreflect {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::NonFiniteRhs: return "NonFiniteRhs";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::NoInteriorMaximum: return "NoInteriorMaximum";
    case ErrorKind::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorKind::ClassicallyForbidden: return "ClassicallyForbidden";
    case ErrorKind::NoRealRoot: return "NoRealRoot";
    case ErrorKind::NoReflectionPoint: return "NoReflectionPoint";
    case ErrorKind::DegenerateInterface: return "DegenerateInterface";
    case ErrorKind::SlabCountOverflow: return "SlabCountOverflow";
    case ErrorKind::ThetaPastMax: return "ThetaPastMax";
    case ErrorKind::EdgeCutTooLarge: return "EdgeCutTooLarge";
    case ErrorKind::CrossCheckFailed: return "CrossCheckFailed";
  }
  return "Unknown";
}

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Numerical: return "numerical";
    case ErrorCategory::Physics: return "physics";
  }
  return "unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::ParseError:
    case ErrorKind::OutOfRange:
    case ErrorKind::DomainError:
    case ErrorKind::DegenerateInterface:
    case ErrorKind::ThetaPastMax:
    case ErrorKind::EdgeCutTooLarge:
      return ErrorCategory::Config;
    case ErrorKind::StepLimitExceeded:
    case ErrorKind::NonFiniteRhs:
    case ErrorKind::ToleranceNotMet:
    case ErrorKind::SeriesNotConverged:
    case ErrorKind::SlabCountOverflow:
    case ErrorKind::CrossCheckFailed:
      return ErrorCategory::Numerical;
    case ErrorKind::NoInteriorMaximum:
    case ErrorKind::ClassicallyForbidden:
    case ErrorKind::NoRealRoot:
    case ErrorKind::NoReflectionPoint:
      return ErrorCategory::Physics;
  }
  return ErrorCategory::Numerical;
}

}  // namespace qreflect
