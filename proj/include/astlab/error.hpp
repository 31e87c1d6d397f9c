#pragma once

#include <stdexcept>
#include <string>

namespace astlab {

/// Caller misuse: bad arguments, out-of-range positions, exceeded caps.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// A builder's validation rejected its inputs (e.g. "data carrier violation",
/// "cascade binding failure"). The message starts with the violation name.
class ConstructionError : public std::runtime_error {
 public:
  explicit ConstructionError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace astlab
