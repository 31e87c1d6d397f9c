#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

namespace astlab {

/// Desk-scale caps enforced by the model layer (parser, CLI, generators).
/// Library constructions accept explicit limits so internal compositions
/// (whose derived product carriers legitimately grow) can relax them.
struct Limits {
  std::size_t max_set_size = 64;
  std::size_t max_relation_size = 4096;
  std::size_t max_element_depth = 8;

  static Limits defaults() { return Limits{}; }

  static Limits unbounded() {
    return Limits{static_cast<std::size_t>(-1), static_cast<std::size_t>(-1),
                  static_cast<std::size_t>(-1)};
  }

  /// Applies the ASTLAB_MAX_RELATION environment override, if set and
  /// parseable as a positive integer.
  static Limits from_environment() {
    Limits l;
    if (const char* v = std::getenv("ASTLAB_MAX_RELATION")) {
      char* end = nullptr;
      const unsigned long long n = std::strtoull(v, &end, 10);
      if (end && *end == '\0' && n > 0)
        l.max_relation_size = static_cast<std::size_t>(n);
    }
    return l;
  }
};

}  // namespace astlab
