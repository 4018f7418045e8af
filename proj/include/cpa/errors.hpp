#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpa {

class GridMismatchError : public std::invalid_argument {
 public:
  GridMismatchError() : std::invalid_argument("distributions live on different size grids") {}
};

// No feasible solution exists (empty feasible family, LP infeasible, an item
// that violates the overflow bound on its own, ...).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A configured enumeration or state cap was exceeded.
class ResourceLimitError : public std::runtime_error {
 public:
  ResourceLimitError(const std::string& what, std::size_t count)
      : std::runtime_error(what + " (count " + std::to_string(count) + ")"), count_(count) {}
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

// A documented precondition of an operation does not hold.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Unbounded objective (e.g. an unlimited-copy item that never consumes
// capacity yet yields profit).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cpa
