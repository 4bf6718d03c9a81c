#pragma once

#include <stdexcept>
#include <string>

namespace bacnoma {

/// Raised for out-of-range or non-finite inputs and malformed config files.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// Raised when a numerical kernel observes a state that only a solver bug can produce.
class InternalConsistencyError : public std::logic_error {
 public:
  explicit InternalConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bacnoma
