#pragma once

#include <stdexcept>
#include <string>

namespace invlab {

/// Malformed or out-of-domain input. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric routine could not produce a trustworthy answer (exit code 3).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace invlab
