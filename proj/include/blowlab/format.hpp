#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace blowlab {

// Shortest representation that round-trips through binary64.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace blowlab
