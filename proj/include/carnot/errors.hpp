#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

/// Base of all library errors. `category()` is the machine-readable tag the
/// CLI reports and maps to an exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "Error"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "ConfigError"; }
};

class GroupValidationError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "GroupValidationError"; }
};

/// Bracket indices are reported 1-based, matching the JSON input.
class GradingViolation : public GroupValidationError {
 public:
  GradingViolation(int i, int j, int k)
      : GroupValidationError("grading violation: [e" + std::to_string(i) + ",e" + std::to_string(j) +
                             "] has a component along e" + std::to_string(k) + " of the wrong degree"),
        i(i), j(j), k(k) {}
  int i, j, k;
};

class JacobiViolation : public GroupValidationError {
 public:
  JacobiViolation(int i, int j, int k)
      : GroupValidationError("Jacobi identity fails for (e" + std::to_string(i) + ",e" + std::to_string(j) +
                             ",e" + std::to_string(k) + ")"),
        i(i), j(j), k(k) {}
  int i, j, k;
};

class AntisymmetryViolation : public GroupValidationError {
 public:
  using GroupValidationError::GroupValidationError;
};

class NumericalResolutionError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "NumericalResolutionError"; }
};

/// A documented precondition of an operation does not hold (dimension
/// mismatch, nonpositive radius, hypothesis of a theorem not met, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "PreconditionError"; }
};

}  // namespace carnot
