#include "dpgda/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace dpgda {

double TomlValue::as_number() const {
    if (kind != Kind::number) throw Error("toml: value is not a number");
    return num;
}

const std::string& TomlValue::as_string() const {
    if (kind != Kind::string) throw Error("toml: value is not a string");
    return str;
}

bool TomlValue::as_bool() const {
    if (kind != Kind::boolean) throw Error("toml: value is not a boolean");
    return flag;
}

const TomlValue& TomlTable::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw Error("toml: missing key: " + key);
    return it->second;
}

double TomlTable::number_or(const std::string& key, double fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second.as_number();
}

std::string TomlTable::string_or(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second.as_string();
}

bool TomlTable::bool_or(const std::string& key, bool fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second.as_bool();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

TomlValue parse_value(const std::string& raw, std::size_t lineno) {
    TomlValue v;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        v.kind = TomlValue::Kind::string;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.kind = TomlValue::Kind::boolean;
        v.flag = raw == "true";
        return v;
    }
    try {
        std::size_t used = 0;
        v.num = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        v.kind = TomlValue::Kind::number;
        return v;
    } catch (const std::exception&) {
        throw Error("toml: bad value on line " + std::to_string(lineno) + ": " + raw);
    }
}

}  // namespace

TomlTable parse_toml_lite(const std::string& text) {
    TomlTable root;
    TomlTable* current = &root;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.size() > 4 && line.substr(0, 2) == "[[" &&
            line.substr(line.size() - 2) == "]]") {
            std::string name = trim(line.substr(2, line.size() - 4));
            if (name.empty()) throw Error("toml: empty table name on line " + std::to_string(lineno));
            root.arrays[name].emplace_back();
            current = &root.arrays[name].back();
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            std::string name = trim(line.substr(1, line.size() - 2));
            if (name.empty()) throw Error("toml: empty table name on line " + std::to_string(lineno));
            current = &root.tables[name];
            continue;
        }
        std::size_t eq = std::string::npos;
        bool in_string = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_string = !in_string;
            if (line[i] == '=' && !in_string) {
                eq = i;
                break;
            }
        }
        if (eq == std::string::npos)
            throw Error("toml: expected key = value on line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string raw = trim(line.substr(eq + 1));
        if (key.empty() || raw.empty())
            throw Error("toml: expected key = value on line " + std::to_string(lineno));
        current->values[key] = parse_value(raw, lineno);
    }
    return root;
}

TomlTable parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_toml_lite(buf.str());
}

}  // namespace dpgda
