#pragma once

#include <stdexcept>
#include <string>

namespace gibbsconv {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (non-positive weight, bad size, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A size guard refused to materialize a product that would not fit in memory.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// A built-in self-audit disagreed beyond its tolerance.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line usage or an unsupported option.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace gibbsconv
