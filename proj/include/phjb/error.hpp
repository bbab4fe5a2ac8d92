#pragma once

#include <stdexcept>
#include <string>

namespace phjb {

/// Raised when an operation is called outside its documented domain
/// (negative time, dimension mismatch, off-grid horizon, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when integration or evaluation produces non-finite numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an exhaustive search would exceed its configured node budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace phjb
