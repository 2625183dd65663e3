#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace auxrl::io {

// Shortest round-trip decimal form, independent of the C++ and C locales.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

}  // namespace auxrl::io
