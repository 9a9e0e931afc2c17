#pragma once

#include <charconv>
#include <string>

namespace myosynth {

/// Shortest round-trip decimal form, locale independent.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace myosynth
