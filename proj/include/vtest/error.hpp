#pragma once

#include <stdexcept>
#include <string>

namespace vtest {

/// Malformed input: files, configs, incompatible option combinations.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric routine could not deliver its contract (no admissible root,
/// degenerate null, ...). The CLI maps this to exit code 1.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vtest
