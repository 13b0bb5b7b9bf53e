#include "redcap/toml_lite.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "redcap/errors.hpp"

namespace redcap::toml {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

std::string parse_quoted(const std::string& s, std::size_t& i, const std::string& origin,
                         int line) {
  std::string out;
  ++i;  // opening quote
  while (i < s.size() && s[i] != '"') {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      switch (s[i]) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        default: fail(origin, line, "unsupported escape in string");
      }
    } else {
      out.push_back(s[i]);
    }
    ++i;
  }
  if (i >= s.size()) fail(origin, line, "unterminated string");
  ++i;  // closing quote
  return out;
}

Value parse_scalar(const std::string& raw, const std::string& origin, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(origin, line, "missing value");
  if (s == "true") return Value{true};
  if (s == "false") return Value{false};
  // integer?
  {
    std::size_t pos = 0;
    try {
      const std::int64_t v = std::stoll(s, &pos);
      if (pos == s.size()) return Value{v};
    } catch (...) {
    }
  }
  // float?
  {
    std::size_t pos = 0;
    try {
      const double v = std::stod(s, &pos);
      if (pos == s.size()) return Value{v};
    } catch (...) {
    }
  }
  fail(origin, line, "cannot parse value '" + s + "' (strings need quotes)");
}

Value parse_value(const std::string& raw, const std::string& origin, int line);

Value parse_array(const std::string& raw, const std::string& origin, int line) {
  std::vector<Value> items;
  std::size_t i = 1;  // past '['
  const std::string s = raw;
  while (i < s.size()) {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    if (i < s.size() && s[i] == ']') return Value{std::move(items)};
    if (i >= s.size()) break;
    if (s[i] == '"') {
      items.push_back(Value{parse_quoted(s, i, origin, line)});
    } else {
      std::size_t j = i;
      while (j < s.size() && s[j] != ',' && s[j] != ']') ++j;
      items.push_back(parse_scalar(s.substr(i, j - i), origin, line));
      i = j;
    }
  }
  fail(origin, line, "unterminated array");
}

Value parse_value(const std::string& raw, const std::string& origin, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(origin, line, "missing value");
  if (s[0] == '"') {
    std::size_t i = 0;
    std::string v = parse_quoted(s, i, origin, line);
    if (trim(s.substr(i)).size() > 0) fail(origin, line, "trailing characters after string");
    return Value{std::move(v)};
  }
  if (s[0] == '[') return parse_array(s, origin, line);
  return parse_scalar(s, origin, line);
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

const std::string& Value::as_string() const {
  if (!is_string()) throw ConfigError("config value is not a string");
  return std::get<std::string>(data);
}
std::int64_t Value::as_int() const {
  if (!is_int()) throw ConfigError("config value is not an integer");
  return std::get<std::int64_t>(data);
}
double Value::as_number() const {
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(data));
  if (!is_float()) throw ConfigError("config value is not a number");
  return std::get<double>(data);
}
bool Value::as_bool() const {
  if (!is_bool()) throw ConfigError("config value is not a boolean");
  return std::get<bool>(data);
}
const std::vector<Value>& Value::as_array() const {
  if (!is_array()) throw ConfigError("config value is not an array");
  return std::get<std::vector<Value>>(data);
}

Table parse(const std::string& text, const std::string& origin) {
  Table table;
  std::string section;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(origin, lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(origin, lineno, "empty key");
    if (!section.empty()) key = section + "." + key;
    if (table.contains(key)) fail(origin, lineno, "duplicate key '" + key + "'");
    table.emplace(std::move(key), parse_value(line.substr(eq + 1), origin, lineno));
  }
  return table;
}

Table parse_file(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("cannot open config file " + file.string());
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse(buf.str(), file.string());
}

std::string get_string(const Table& t, const std::string& key, std::string fallback) {
  auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_string();
}
std::int64_t get_int(const Table& t, const std::string& key, std::int64_t fallback) {
  auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_int();
}
double get_number(const Table& t, const std::string& key, double fallback) {
  auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_number();
}
bool get_bool(const Table& t, const std::string& key, bool fallback) {
  auto it = t.find(key);
  return it == t.end() ? fallback : it->second.as_bool();
}
std::vector<std::string> get_string_array(const Table& t, const std::string& key,
                                          std::vector<std::string> fallback) {
  auto it = t.find(key);
  if (it == t.end()) return fallback;
  std::vector<std::string> out;
  for (const Value& v : it->second.as_array()) out.push_back(v.as_string());
  return out;
}

}  // namespace redcap::toml
