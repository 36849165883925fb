#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace ballwalk::detail {

/// Shortest "%.17g" rendering; round-trips through strtod.
inline std::string format_double(double v) {
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace ballwalk::detail
