#ifndef LISTREC_UTIL_HPP
#define LISTREC_UTIL_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "listrec/errors.hpp"

namespace listrec {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Bit-exact hex-float form, for model dumps.
inline std::string format_double_hex(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

// Strict full-string parses; `what` names the field in the error message.
inline double parse_double(std::string_view s, const std::string& what) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("not a number for " + what + ": '" + std::string(s) + "'");
    return v;
}

inline double parse_double_hex(std::string_view s, const std::string& what) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("not a hex float for " + what + ": '" + std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s, const std::string& what) {
    std::int64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("not an integer for " + what + ": '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split_view(std::string_view s, std::string_view delim) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t next = s.find(delim, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + delim.size();
    }
    return out;
}

// Drops a trailing '\r' so CRLF files load cleanly.
inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

inline bool is_integral_value(double v) {
    return std::isfinite(v) && v == std::floor(v);
}

} // namespace listrec

#endif // LISTREC_UTIL_HPP
