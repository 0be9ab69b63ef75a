#pragma once

// Internal text helpers shared by the CSV writers. Doubles are formatted with
// std::to_chars (shortest round-trip form) so output bytes are deterministic.

#include <charconv>
#include <string>

namespace cmbo::detail {

inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline std::string sanitize_token(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? "_" : out;
}

}  // namespace cmbo::detail
