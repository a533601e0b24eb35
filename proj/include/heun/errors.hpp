#pragma once

#include <stdexcept>
#include <string>

namespace heun {

// Base for all numerical failures raised by this library.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative scheme failed to reach its tolerance; carries the best residual seen.
struct ConvergenceError : NumericalError {
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual(residual) {}
  double residual = 0.0;
};

// A square-root branch could not be resolved (point too close to a cut).
struct BranchAmbiguityError : NumericalError {
  using NumericalError::NumericalError;
};

// Quadrature nodes too coarse to track the integrand branch.
struct RefineRuleError : NumericalError {
  using NumericalError::NumericalError;
};

// Operator outside the generic setting (v1 = 0, repeated roots, ...).
struct DegenerateOperatorError : NumericalError {
  using NumericalError::NumericalError;
};

// Configuration the module does not handle (higher-order zeros/poles, ...).
struct UnsupportedConfigError : NumericalError {
  using NumericalError::NumericalError;
};

struct InvalidArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace heun
