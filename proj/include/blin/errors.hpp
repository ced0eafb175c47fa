#pragma once

#include <stdexcept>
#include <string>

namespace blin {

/// Invalid configuration or precondition violation (bad schedule, horizon, params).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Violation of the batched-feedback contract (e.g. reading uncommitted rewards).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace blin
