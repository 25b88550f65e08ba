// Locale-independent numeric formatting: every number the toolkit emits goes
// through 12-significant-digit general formatting so golden files are stable
// across platforms.
#pragma once

#include <charconv>
#include <string>

namespace trisk {

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    return std::string(buf, ptr);
}

// Round to the 12-digit decimal grid (parse of format_number's output); used
// before handing values to the JSON layer.
inline double round_number(double v) {
    const std::string s = format_number(v);
    return std::strtod(s.c_str(), nullptr);
}

}  // namespace trisk
