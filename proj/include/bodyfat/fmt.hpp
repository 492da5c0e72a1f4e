#pragma once

#include <charconv>
#include <string>

namespace bodyfat {

// Shortest decimal that round-trips to the same double. All emitted
// artifacts (CSV, JSON) use this so repeated runs are byte-identical.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace bodyfat
