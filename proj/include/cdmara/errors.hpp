#pragma once

#include <stdexcept>

namespace cdmara {

// Error taxonomy mirrored by the CLI exit codes:
// ConfigError -> 1, NumericalError -> 2, DomainError -> 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solver failed to converge within its iteration budget.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The request is outside the region where the model is defined
// (e.g. overloaded decorrelator with unequal powers).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cdmara
