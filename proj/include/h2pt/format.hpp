#pragma once

// Shortest round-trip formatting of doubles (std::to_chars), used for all
// serialized numeric output so that re-reading reproduces values bit-exactly.

#include <charconv>
#include <string>

namespace h2pt {

inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

} // namespace h2pt
