#pragma once

#include <stdexcept>
#include <string>

namespace cmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class ParameterError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parameter"; }
};

class DegenerateChartError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_chart"; }
};

class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "unsupported_family"; }
};

/// Raised when a spectrum does not reach far enough to decide a count.
class InsufficientEnumerationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "insufficient_enumeration"; }
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  const char* kind() const noexcept override { return "convergence"; }
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invariant_violation"; }
};

}  // namespace cmc
