#pragma once

#include <stdexcept>
#include <string>

namespace autotune {

/// Argument outside the domain of an operation (out-of-range configuration,
/// empty sample, non-positive optimum, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Strategy called with a sample budget it cannot honor.
class BudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Slice request that overruns a pre-generated dataset.
class CapacityError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Linear algebra failure that jitter escalation could not repair.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive enumeration requested on a space above the size guard.
class RefusalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem with a plan document. `line` is 1-based, 0 when unknown.
class PlanError : public std::runtime_error {
 public:
  PlanError(const std::string& message, int line = 0, std::string key = {})
      : std::runtime_error(message), line_(line), key_(std::move(key)) {}

  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Results store that is missing experiments required by the plan.
class IncompleteStoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace autotune
