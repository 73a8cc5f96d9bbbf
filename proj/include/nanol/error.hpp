#pragma once

#include <stdexcept>
#include <string>

namespace nanol {

// Base for everything thrown by the library, so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failures (exit code 4 at the CLI boundary).
struct NumericalError : Error {
  using Error::Error;
};

// Rotation log requested within ~1e-6 of the pi cut, where the axis is not
// recoverable from R - R^T.
struct AngleNearPiError : NumericalError {
  using NumericalError::NumericalError;
};

// Cholesky failed even after the one permitted jitter retry.
struct NotPsdError : NumericalError {
  using NumericalError::NumericalError;
};

// Measurement covariance too ill-conditioned to invert (cond > 1e12).
struct SingularGammaError : NumericalError {
  using NumericalError::NumericalError;
};

// Leg inverse kinematics did not converge for a sample.
struct IkFailureError : NumericalError {
  using NumericalError::NumericalError;
};

// Two series that must be index-aligned have different lengths.
struct LengthMismatchError : Error {
  using Error::Error;
};

// Relative-error window does not fit inside the series.
struct WindowTooLongError : Error {
  using Error::Error;
};

// Malformed input file (exit code 3 at the CLI boundary).
struct ParseError : Error {
  ParseError(const std::string& file, long line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_name(file),
        line_number(line) {}
  std::string file_name;
  long line_number;
};

// Timestamps in an input file go backwards or repeat.
struct NonMonotonicTimeError : ParseError {
  using ParseError::ParseError;
};

// Invalid or inconsistent configuration (exit code 2 at the CLI boundary).
struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
  ConfigError(const std::string& json_path, const std::string& what)
      : Error(json_path + ": " + what), path(json_path) {}
  std::string path;
};

}  // namespace nanol
