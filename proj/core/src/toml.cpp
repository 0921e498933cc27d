#include "wena/toml.hpp"

#include "wena/csv.hpp"
#include "wena/error.hpp"

#include <algorithm>
#include <cctype>

namespace wena {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

std::string parse_string_literal(const std::string& raw, int line_no) {
    if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        throw Error(ErrorCode::ParseError,
                    "toml line " + std::to_string(line_no) + ": malformed string " + raw);
    std::string out;
    for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
        if (raw[i] == '\\' && i + 2 < raw.size()) {
            ++i;
            switch (raw[i]) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: out.push_back(raw[i]);
            }
        } else {
            out.push_back(raw[i]);
        }
    }
    return out;
}

std::vector<std::string> split_array_items(const std::string& inner) {
    std::vector<std::string> items;
    std::string current;
    bool in_string = false;
    for (char c : inner) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            items.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    const std::string last = trim(current);
    if (!last.empty()) items.push_back(last);
    return items;
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
    TomlTable table;
    std::string prefix;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        line = trim(strip_comment(line));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(ErrorCode::ParseError,
                            "toml line " + std::to_string(line_no) + ": unterminated table header");
            prefix = trim(line.substr(1, line.size() - 2));
            if (prefix.empty())
                throw Error(ErrorCode::ParseError,
                            "toml line " + std::to_string(line_no) + ": empty table name");
            prefix += '.';
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ParseError,
                        "toml line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = prefix + trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        if (key.empty() || raw.empty())
            throw Error(ErrorCode::ParseError,
                        "toml line " + std::to_string(line_no) + ": empty key or value");

        if (raw.front() == '"') {
            table.values_[key] = parse_string_literal(raw, line_no);
        } else if (raw == "true" || raw == "false") {
            table.values_[key] = (raw == "true");
        } else if (raw.front() == '[') {
            if (raw.back() != ']')
                throw Error(ErrorCode::ParseError,
                            "toml line " + std::to_string(line_no) + ": unterminated array");
            const auto items = split_array_items(raw.substr(1, raw.size() - 2));
            const bool strings = !items.empty() && items.front().front() == '"';
            if (strings) {
                std::vector<std::string> out;
                for (const auto& item : items) out.push_back(parse_string_literal(item, line_no));
                table.values_[key] = std::move(out);
            } else {
                std::vector<double> out;
                for (const auto& item : items) {
                    const auto v = csv::parse_number(item);
                    if (!v)
                        throw Error(ErrorCode::ParseError, "toml line " + std::to_string(line_no) +
                                                               ": bad number '" + item + "'");
                    out.push_back(*v);
                }
                table.values_[key] = std::move(out);
            }
        } else {
            const auto v = csv::parse_number(raw);
            if (!v)
                throw Error(ErrorCode::ParseError, "toml line " + std::to_string(line_no) +
                                                       ": bad value '" + raw + "'");
            table.values_[key] = *v;
        }
    }
    return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    const auto lines = csv::read_lines(path);
    std::string text;
    for (const auto& line : lines) {
        text += line;
        text.push_back('\n');
    }
    return parse(text);
}

std::optional<std::string> TomlTable::get_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    throw Error(ErrorCode::ParseError, "toml key '" + key + "' is not a string");
}

std::optional<double> TomlTable::get_number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* b = std::get_if<bool>(&it->second)) return *b ? 1.0 : 0.0;
    throw Error(ErrorCode::ParseError, "toml key '" + key + "' is not a number");
}

std::optional<bool> TomlTable::get_bool(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* b = std::get_if<bool>(&it->second)) return *b;
    throw Error(ErrorCode::ParseError, "toml key '" + key + "' is not a boolean");
}

std::optional<std::vector<std::string>> TomlTable::get_string_array(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* arr = std::get_if<std::vector<std::string>>(&it->second)) return *arr;
    throw Error(ErrorCode::ParseError, "toml key '" + key + "' is not a string array");
}

std::optional<std::vector<double>> TomlTable::get_number_array(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    if (const auto* arr = std::get_if<std::vector<double>>(&it->second)) return *arr;
    throw Error(ErrorCode::ParseError, "toml key '" + key + "' is not a number array");
}

std::vector<std::string> TomlTable::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> keys;
    for (const auto& [key, value] : values_)
        if (key.rfind(prefix, 0) == 0) keys.push_back(key);
    return keys;
}

}  // namespace wena
