#pragma once

#include <stdexcept>
#include <string>

namespace ppdiag {

// Invalid inputs: broken invariants, out-of-range arguments, malformed files.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failures: overflow, underflow despite scaling, non-convergence,
// simulator explosion. The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem and parse failures. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ppdiag
