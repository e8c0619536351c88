#pragma once

#include <stdexcept>
#include <string>

namespace rte {

// Bad argument or shape mismatch.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Point outside the closed domain.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// sigma - int k dv' <= 0 somewhere.
class AdmissibilityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Iterative solver ran out of budget.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

private:
  int iterations_;
  double residual_;
};

// Experiment layout does not fit the grid (counterpart not near a node, etc).
class ConfigurationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace rte
