#pragma once

#include <stdexcept>
#include <string>

namespace plaque {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& m) : Error("parameter", m) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& m) : Error("precondition", m) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& m) : Error("numerical", m) {}
};

/// Raised when a time integrator produces NaN/Inf.
class DivergenceError : public Error {
 public:
  DivergenceError(double t, double dt, const std::string& m)
      : Error("divergence", m), t_(t), dt_(dt) {}
  double time() const noexcept { return t_; }
  double dt() const noexcept { return dt_; }

 private:
  double t_;
  double dt_;
};

}  // namespace plaque
