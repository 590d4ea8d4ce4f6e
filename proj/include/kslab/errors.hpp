#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

/// Malformed input: bad sizes, non-monotone grids, violated preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters outside the range where the model's theory applies
/// (n < 3, m above the critical exponent, mass below the blow-up threshold).
class OutOfTheory : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration file or command-line problems.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical step produced an inadmissible state (negative density,
/// loss of monotonicity). Callers usually retry with a smaller step.
class StepFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Initial data could not be built to satisfy the requested conditions.
class ConstructionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kslab
