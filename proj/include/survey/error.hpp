#pragma once

#include <stdexcept>
#include <string>

namespace survey {

// Thrown when an input violates a documented precondition or invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace survey
