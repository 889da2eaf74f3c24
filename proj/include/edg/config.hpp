#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace edg {

/**
 * Sectioned key-value file:
 *
 *     # comment
 *     [kernel]
 *     family = constant
 *
 * Keys before any section header belong to the section "run".
 */
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string str(const std::string& section, const std::string& key) const;
    std::string str(const std::string& section, const std::string& key, const std::string& def) const;
    double num(const std::string& section, const std::string& key) const;
    double num(const std::string& section, const std::string& key, double def) const;
    long integer(const std::string& section, const std::string& key) const;
    long integer(const std::string& section, const std::string& key, long def) const;
    bool flag(const std::string& section, const std::string& key, bool def) const;
    std::vector<double> num_list(const std::string& section, const std::string& key) const;
    std::vector<long> int_list(const std::string& section, const std::string& key) const;

    /// Raw text, for manifests.
    const std::string& text() const { return text_; }
    std::uint64_t hash() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    const Entry& entry(const std::string& section, const std::string& key) const;

    std::map<std::string, std::map<std::string, Entry>> data_;
    std::string text_;
};

}  // namespace edg
