#pragma once

#include <stdexcept>
#include <string>

namespace expent {

/// Argument outside the mathematical domain of a function (r <= 0,
/// w1 <= w_min, degenerate triangle, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed: step-size underflow, step budget exhausted,
/// Newton non-convergence, tangent overflow.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton hit a singular Jacobian (typically at a bifurcation point).
class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace expent
