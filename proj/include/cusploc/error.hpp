#pragma once

#include <stdexcept>
#include <string>

namespace cusploc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A model invariant does not hold (non-positive intensity, non-normalizable density, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public NumericalError {
 public:
  FactorizationError(const std::string& what, double min_eigenvalue)
      : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

class WindowTooSmallError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cusploc
