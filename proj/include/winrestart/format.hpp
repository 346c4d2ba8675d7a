#pragma once

#include <charconv>
#include <string>
#include <system_error>

#include "winrestart/errors.hpp"

namespace winrestart {

// Locale-independent decimal formatting with 17 significant digits, enough
// for doubles to round-trip bit-exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last)
        throw Error("cannot parse '" + s + "' as a number");
    return v;
}

}  // namespace winrestart
