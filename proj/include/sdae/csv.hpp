#pragma once

#include <cstdio>
#include <string>

namespace sdae::csv {

// Round-trip formatting for all numeric CSV output (17 significant digits).
inline std::string full(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

} // namespace sdae::csv
