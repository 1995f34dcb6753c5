#include "sflsim/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sflsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '#' || s[i] == ';') return s.substr(0, i);
    }
    return s;
}

} // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(strip_comment(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": unterminated section header");
            section = trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": key '" + key + "' outside any [section]");
        auto [it, inserted] = cfg.sections_[section].emplace(key, Entry{value, lineno});
        if (!inserted)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' in [" + section + "] (first at line " +
                              std::to_string(it->second.line) + ")");
    }
    return cfg;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    k->second.consumed = true;
    return &k->second;
}

const Config::Entry& Config::require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e)
        throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
    return *e;
}

void Config::fail(const Entry& e, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": " + msg);
}

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
    return require(section, key).value;
}

std::string Config::get_string_or(const std::string& section, const std::string& key,
                                  const std::string& def) const {
    const Entry* e = find(section, key);
    return e ? e->value : def;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    try {
        std::size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) fail(e, "trailing characters after number: '" + e.value + "'");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        fail(e, "expected a number for '" + key + "', got '" + e.value + "'");
    }
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double def) const {
    return find(section, key) ? get_double(section, key) : def;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
    const Entry& e = require(section, key);
    long long v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        fail(e, "expected an integer for '" + key + "', got '" + e.value + "'");
    return v;
}

long long Config::get_int_or(const std::string& section, const std::string& key,
                             long long def) const {
    return find(section, key) ? get_int(section, key) : def;
}

bool Config::get_bool_or(const std::string& section, const std::string& key, bool def) const {
    const Entry* e = find(section, key);
    if (!e) return def;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(*e, "expected a boolean for '" + key + "', got '" + e->value + "'");
}

std::vector<double> Config::get_double_list(const std::string& section,
                                            const std::string& key) const {
    const Entry& e = require(section, key);
    std::vector<double> out;
    std::string item;
    std::istringstream ss(e.value);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(e, "empty element in list '" + key + "'");
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            fail(e, "expected a number in list '" + key + "', got '" + item + "'");
        }
    }
    if (out.empty()) fail(e, "list '" + key + "' is empty");
    return out;
}

std::optional<double> Config::get_optional_double(const std::string& section,
                                                  const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e || e->value.empty() || e->value == "none") return std::nullopt;
    return get_double(section, key);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = Entry{value, 0, false};
}

void Config::reject_unconsumed() const {
    for (const auto& [sec, keys] : sections_) {
        for (const auto& [key, entry] : keys) {
            if (!entry.consumed)
                throw ConfigError(origin_ + ":" + std::to_string(entry.line) + ": unknown key '" +
                                  key + "' in [" + sec + "]");
        }
    }
}

std::string Config::serialize() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [sec, keys] : sections_) {
        if (!first) out << "\n";
        first = false;
        out << "[" << sec << "]\n";
        for (const auto& [key, entry] : keys) out << key << " = " << entry.value << "\n";
    }
    return out.str();
}

} // namespace sflsim
