#pragma once

#include <stdexcept>
#include <string>

namespace dfpower {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong shape: non-square input, n < 3, mismatched lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN or infinite entries in an input.
class NumericInputError : public Error {
 public:
  using Error::Error;
};

// A matrix or vector that fails a structural requirement
// (row-stochastic, zero diagonal, irreducible, on the simplex).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Parameter combinations a topology variation does not admit.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace dfpower
