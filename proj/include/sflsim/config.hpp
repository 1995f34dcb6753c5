#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sflsim/errors.hpp"

namespace sflsim {

// INI-style configuration: [section] headers, key = value pairs,
// '#' or ';' comments. Parsing is strict; every diagnostic carries the
// offending line number.
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    // Typed getters. The *_or forms return the default when the key is
    // absent; the plain forms throw ConfigError.
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& def) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key, double def) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key, long long def) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool def) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

    std::optional<double> get_optional_double(const std::string& section,
                                              const std::string& key) const;

    // Overwrite or insert a value (used when resolving CLI overrides).
    void set(const std::string& section, const std::string& key, const std::string& value);

    // Throws if any key was never read by a getter; catches typos like
    // a misspelled key that would otherwise be silently ignored.
    void reject_unconsumed() const;

    // Canonical serialization: sections and keys in sorted order, one
    // blank line between sections. Parsing the output reproduces the
    // same resolved configuration.
    std::string serialize() const;

    const std::string& origin() const { return origin_; }

private:
    const Entry* find(const std::string& section, const std::string& key) const;
    const Entry& require(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail(const Entry& e, const std::string& msg) const;

    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string origin_;
};

} // namespace sflsim
