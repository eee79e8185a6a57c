#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

/// Raised for inputs that violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical result breaks a physical invariant
/// (positivity, trace) beyond tolerance.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative procedure (steady state, fit, truncation,
/// grid refinement) fails to meet its stopping criterion.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace cqed
