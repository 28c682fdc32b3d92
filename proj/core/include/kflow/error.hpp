#pragma once

#include <stdexcept>
#include <string>

namespace kflow {

/// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: wrong resolution, malformed config key, precondition violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operator undefined for the given flow (kernel sign, class mismatch, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shear profile that fits neither class 1 nor class K+.
class ClassificationError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Time integration or linear algebra failed at run time.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double time = 0.0)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class CflError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kflow
