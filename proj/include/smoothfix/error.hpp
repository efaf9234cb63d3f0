#pragma once

#include <stdexcept>
#include <string>

namespace smoothfix {

// Bad input: invalid model parameters, violated preconditions, malformed
// configuration. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure while computing: overflow, truncation, insufficient signal.
// The CLI maps these to exit code 2.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace smoothfix
