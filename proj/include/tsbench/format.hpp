#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace tsbench {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

/// Strict parse of a whole field; throws std::invalid_argument on junk.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace tsbench
