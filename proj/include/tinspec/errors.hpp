#pragma once

#include <stdexcept>
#include <string>

namespace tinspec {

/// Malformed or out-of-contract input (wrong sizes, non-PSD matrices, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix that must be invertible fell below the singularity threshold.
class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that is mathematically valid but leaves the requested quantity
/// undetermined, or a result that breaks a guaranteed property beyond rounding.
class NumericalDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver did not reach its tolerance.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace tinspec
