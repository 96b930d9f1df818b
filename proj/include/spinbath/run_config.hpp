#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinbath {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigKey {
    std::string name;
    std::string default_value;
    std::string help;  // includes units
};

// Every recognised key in the order shown by --help.
const std::vector<ConfigKey>& config_keys();

// Flat key = value text; [section] headers only group keys, '#' starts a comment.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

struct RunConfig {
    std::map<std::string, std::string> values;  // every key, defaults filled in

    static RunConfig from_map(const std::map<std::string, std::string>& overrides);

    const std::string& str(const std::string& key) const;
    double number(const std::string& key) const;
    long integer(const std::string& key) const;
    std::uint64_t seed() const;
    bool flag(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;  // comma separated
    bool has(const std::string& key) const { return !str(key).empty(); }
};

}  // namespace spinbath
