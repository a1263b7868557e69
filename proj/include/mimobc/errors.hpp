#pragma once

#include <stdexcept>

namespace mimobc {

/// A dense factorization failed to converge (numerically pathological input).
class DecompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix is singular or beyond the configured condition-number cap.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive search space exceeds the configured subset budget.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration input failed validation; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mimobc
