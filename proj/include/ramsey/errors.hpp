#pragma once

#include <stdexcept>
#include <string>

namespace ramsey {

// Input outside the mathematical domain of an operation (bad parameters,
// nonpositive arguments, malformed grids or configs).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A numerical procedure failed to deliver its postcondition
// (non-convergence, loss of monotonicity, quadrature failure).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ramsey
