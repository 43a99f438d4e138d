#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vamos/types.hpp"

namespace vamos {

/// Bad key, value or file in a run configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

/// Missing mapping table without permission to generate it (exit code 3).
struct MissingTableError : Error {
    using Error::Error;
};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
std::map<std::string, std::string> parse_key_values(const std::string& text,
                                                    const std::string& source = "<text>");

/// Effective run settings: defaults, then a config file, then command-line
/// overrides, each layer replacing the previous one. Only registered keys
/// are accepted.
class Settings {
public:
    Settings();

    void apply(const std::map<std::string, std::string>& values, const std::string& source);
    void load_file(const std::string& path);
    /// `key=value` strings as given to --set.
    void apply_overrides(const std::vector<std::string>& assignments);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// Comma-separated values or `lo:hi:step` ranges.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    /// FNV-1a over the sorted `key=value` lines.
    std::uint64_t hash() const;

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace vamos
