#pragma once

#include <stdexcept>
#include <string>

namespace relaysec {

enum class ErrorKind {
  InfeasibleGeometry,
  DegenerateDistance,
  InvalidParameter,
  HdRestrictionViolated,
  LengthMismatch,
  ApproximationUndefined,
  InfeasibleStart,
  GridTooLarge,
  MissingAnchor,
  ConfigError,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorKind::DegenerateDistance: return "DegenerateDistance";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::HdRestrictionViolated: return "HdRestrictionViolated";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::ApproximationUndefined: return "ApproximationUndefined";
    case ErrorKind::InfeasibleStart: return "InfeasibleStart";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::MissingAnchor: return "MissingAnchor";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace relaysec
