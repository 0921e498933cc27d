#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wena {

/// Minimal TOML reader covering what run configs need: [table] and [a.b]
/// headers, string/number/boolean scalars, flat arrays, and # comments.
/// Values are stored under dotted keys ("ae.edges.hidden").
class TomlTable {
  public:
    using Value = std::variant<std::string, double, bool, std::vector<std::string>,
                               std::vector<double>>;

    static TomlTable parse(const std::string& text);
    static TomlTable parse_file(const std::string& path);

    bool contains(const std::string& key) const { return values_.count(key) > 0; }

    std::optional<std::string> get_string(const std::string& key) const;
    std::optional<double> get_number(const std::string& key) const;
    std::optional<bool> get_bool(const std::string& key) const;
    std::optional<std::vector<std::string>> get_string_array(const std::string& key) const;
    std::optional<std::vector<double>> get_number_array(const std::string& key) const;

    /// All keys under a dotted prefix (e.g. "models.etr.").
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

    void set(const std::string& key, Value value) { values_[key] = std::move(value); }

  private:
    std::map<std::string, Value> values_;
};

}  // namespace wena
