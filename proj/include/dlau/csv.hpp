#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace dlau::csv {

/// Shortest round-trip decimal form, locale independent.
inline std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string num(std::uint64_t v) { return std::to_string(v); }

}  // namespace dlau::csv
