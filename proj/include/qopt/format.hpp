#pragma once

#include <charconv>
#include <cmath>
#include <string>

namespace qopt {

/// Shortest round-trip decimal form of a finite double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

/// Fixed significant-digit scientific form.
inline std::string format_sci(double x, int digits) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, digits);
    return {buf, res.ptr};
}

}  // namespace qopt
