#pragma once

#include <map>
#include <string>
#include <vector>

#include "dpgda/common.hpp"

namespace dpgda {

/// Minimal TOML subset used for experiment manifests: top-level key/value
/// pairs, [table] sections one level deep, and [[array-of-tables]]
/// sections. Values are strings, numbers or booleans.
struct TomlValue {
    enum class Kind { string, number, boolean } kind = Kind::string;
    std::string str;
    double num = 0.0;
    bool flag = false;

    double as_number() const;
    const std::string& as_string() const;
    bool as_bool() const;
};

struct TomlTable {
    std::map<std::string, TomlValue> values;
    std::map<std::string, std::vector<TomlTable>> arrays;
    std::map<std::string, TomlTable> tables;

    bool has(const std::string& key) const { return values.count(key) != 0; }
    const TomlValue& at(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string string_or(const std::string& key, const std::string& fallback) const;
    bool bool_or(const std::string& key, bool fallback) const;
};

TomlTable parse_toml_lite(const std::string& text);
TomlTable parse_toml_file(const std::string& path);

}  // namespace dpgda
