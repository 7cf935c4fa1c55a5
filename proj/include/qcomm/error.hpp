#pragma once

#include <stdexcept>
#include <string>

namespace qcomm {

// Raised when an input violates a documented precondition. The CLI maps it
// to exit code 2; everything else that escapes is a runtime failure (1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace qcomm
