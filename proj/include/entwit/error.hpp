#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entwit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A probability vector fails the non-negativity / normalization invariants.
class InvalidDistribution : public Error {
 public:
  using Error::Error;
};

/// A matrix is not a valid Hermitian operator or density matrix.
class InvalidState : public Error {
 public:
  using Error::Error;
};

/// Operand shapes (dimensions, preparation or measurement counts) disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The requested witness value cannot be reached by any admissible model.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A strategy enumeration would exceed the size guard.
class GuardExceeded : public Error {
 public:
  GuardExceeded(const std::string& what, std::size_t count)
      : Error(what), count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

/// An iterative solver stopped without meeting its tolerance.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace entwit
