#pragma once

#include <stdexcept>
#include <string>

namespace amol {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied parameters was violated.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

/// Problem size exceeds what the requested algorithm supports.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of budget. Carries the best residual reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what + " (best residual " + std::to_string(best_residual) + ")"),
        best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// Canonical (population, phase) coordinates are undefined at this point.
class SingularCoordinates : public Error {
 public:
  using Error::Error;
};

class IntegrationFailure : public Error {
 public:
  using Error::Error;
};

/// Accepted step advanced a tracked phase by too much to unwrap reliably.
class StepSizeError : public IntegrationFailure {
 public:
  using IntegrationFailure::IntegrationFailure;
};

/// Minimum found on the edge of the search bracket.
class BracketError : public Error {
 public:
  using Error::Error;
};

class InvalidData : public Error {
 public:
  using Error::Error;
};

}  // namespace amol
