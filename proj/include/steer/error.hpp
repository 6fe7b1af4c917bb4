#pragma once

#include <stdexcept>
#include <string>

namespace steer {

// Malformed input, inconsistent dimensions, schema violations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solver failures, residuals above tolerance, unbounded problems.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Threshold scan endpoints without a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace steer
