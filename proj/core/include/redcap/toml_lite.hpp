#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace redcap::toml {

/// Minimal TOML subset: [section] / [a.b] headers, key = value pairs with
/// strings, integers, floats, booleans and flat arrays, # comments. Keys are
/// flattened to "section.key".
struct Value {
  std::variant<std::string, std::int64_t, double, bool, std::vector<Value>> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_float() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_array() const { return std::holds_alternative<std::vector<Value>>(data); }

  const std::string& as_string() const;
  std::int64_t as_int() const;
  double as_number() const;  // int or float
  bool as_bool() const;
  const std::vector<Value>& as_array() const;
};

using Table = std::map<std::string, Value>;

Table parse(const std::string& text, const std::string& origin = "<string>");
Table parse_file(const std::filesystem::path& file);

// Typed lookups with defaults; a present key of the wrong type throws.
std::string get_string(const Table& t, const std::string& key, std::string fallback);
std::int64_t get_int(const Table& t, const std::string& key, std::int64_t fallback);
double get_number(const Table& t, const std::string& key, double fallback);
bool get_bool(const Table& t, const std::string& key, bool fallback);
std::vector<std::string> get_string_array(const Table& t, const std::string& key,
                                          std::vector<std::string> fallback);

}  // namespace redcap::toml
