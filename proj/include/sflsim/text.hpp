#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace sflsim {

// Shortest decimal form that parses back to the identical double; keeps
// serialized artifacts byte-stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_list(const std::string& text, char sep = ',') {
    std::vector<std::string> out;
    std::string token;
    for (const char ch : text) {
        if (ch == sep) {
            out.push_back(token);
            token.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            token += ch;
        }
    }
    out.push_back(token);
    return out;
}

} // namespace sflsim
