#pragma once

#include <charconv>
#include <string>

namespace biaslearn {

// Shortest decimal form that round-trips the exact double. Keeps every text
// artifact byte-deterministic without dragging 17-digit noise into CSVs.
inline std::string fmt_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace biaslearn
