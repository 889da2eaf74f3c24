#include "edg/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "edg/errors.hpp"

namespace edg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string field_name(const std::string& section, const std::string& key) { return section + "." + key; }

double parse_double(const std::string& v, int line, const std::string& field) {
    const char* b = v.c_str();
    char* e = nullptr;
    errno = 0;
    const double x = std::strtod(b, &e);
    if (e == b || *e != '\0' || errno == ERANGE)
        throw ConfigError("line " + std::to_string(line) + ": field '" + field + "' expects a number, got '" +
                              v + "'",
                          line, field);
    return x;
}

long parse_long(const std::string& v, int line, const std::string& field) {
    const char* b = v.c_str();
    char* e = nullptr;
    errno = 0;
    const long x = std::strtol(b, &e, 10);
    if (e == b || *e != '\0' || errno == ERANGE)
        throw ConfigError("line " + std::to_string(line) + ": field '" + field + "' expects an integer, got '" +
                              v + "'",
                          line, field);
    return x;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config c;
    c.text_ = text;
    std::stringstream ss(text);
    std::string raw, section = "run";
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3)
                throw ConfigError("line " + std::to_string(line) + ": malformed section header", line, "");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line, "");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key", line, "");
        auto& sec = c.data_[section];
        if (sec.count(key))
            throw ConfigError("line " + std::to_string(line) + ": duplicate field '" + field_name(section, key) + "'",
                              line, field_name(section, key));
        sec[key] = {val, line};
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'", 0, "");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw ConfigError("missing required field '" + field_name(section, key) + "'", 0, field_name(section, key));
    return data_.at(section).at(key);
}

std::string Config::str(const std::string& section, const std::string& key) const {
    return entry(section, key).value;
}

std::string Config::str(const std::string& section, const std::string& key, const std::string& def) const {
    return has(section, key) ? str(section, key) : def;
}

double Config::num(const std::string& section, const std::string& key) const {
    const auto& e = entry(section, key);
    return parse_double(e.value, e.line, field_name(section, key));
}

double Config::num(const std::string& section, const std::string& key, double def) const {
    return has(section, key) ? num(section, key) : def;
}

long Config::integer(const std::string& section, const std::string& key) const {
    const auto& e = entry(section, key);
    return parse_long(e.value, e.line, field_name(section, key));
}

long Config::integer(const std::string& section, const std::string& key, long def) const {
    return has(section, key) ? integer(section, key) : def;
}

bool Config::flag(const std::string& section, const std::string& key, bool def) const {
    if (!has(section, key)) return def;
    const auto& e = entry(section, key);
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    throw ConfigError("line " + std::to_string(e.line) + ": field '" + field_name(section, key) +
                          "' expects true/false",
                      e.line, field_name(section, key));
}

std::vector<double> Config::num_list(const std::string& section, const std::string& key) const {
    const auto& e = entry(section, key);
    std::vector<double> out;
    for (const auto& s : split_list(e.value)) out.push_back(parse_double(s, e.line, field_name(section, key)));
    if (out.empty())
        throw ConfigError("line " + std::to_string(e.line) + ": field '" + field_name(section, key) +
                              "' must be a nonempty list",
                          e.line, field_name(section, key));
    return out;
}

std::vector<long> Config::int_list(const std::string& section, const std::string& key) const {
    const auto& e = entry(section, key);
    std::vector<long> out;
    for (const auto& s : split_list(e.value)) out.push_back(parse_long(s, e.line, field_name(section, key)));
    if (out.empty())
        throw ConfigError("line " + std::to_string(e.line) + ": field '" + field_name(section, key) +
                              "' must be a nonempty list",
                          e.line, field_name(section, key));
    return out;
}

std::uint64_t Config::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text_) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace edg
