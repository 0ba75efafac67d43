#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reflectolab {

/// Input outside the domain of an operation (bad grid, point outside G, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The per-step complementarity problem had no feasible active set.
/// Usually means the mesh is too coarse near the vertex.
class UnsolvableStep : public std::runtime_error {
 public:
  UnsolvableStep(std::vector<double> z_prev, std::vector<double> delta);

  const std::vector<double>& z_prev() const noexcept { return z_prev_; }
  const std::vector<double>& delta() const noexcept { return delta_; }

 private:
  std::vector<double> z_prev_;
  std::vector<double> delta_;
};

/// Problem size beyond what the solvers support (e.g. J > 12).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A coefficient evaluator returned a non-finite value or exceeded its bound.
class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace reflectolab
