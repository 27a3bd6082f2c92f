#pragma once

#include <stdexcept>

namespace semtrace {

/// Input violates a documented precondition or schema rule.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semtrace
