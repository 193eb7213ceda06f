#pragma once

#include <stdexcept>
#include <string>

namespace hypercolor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file header, bad magic, unsupported image variant.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File ended before the payload announced by its header.
class TruncationError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// A value violates a type invariant (NaN payload, unsorted wavelengths, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied out-of-range or inconsistent parameters.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure; the message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration is incomplete or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed (singular system, non-convergence).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : Error(what), residual_(residual) {}

  /// Relative residual reached before giving up, when applicable.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace hypercolor
