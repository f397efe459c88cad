#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "g2flow/errors.hpp"

namespace g2flow {

/// Value of a TOML key: integer, float, string, boolean or a flat array.
struct TomlValue {
  enum class Kind { Int, Float, Str, Bool, Array } kind = Kind::Int;
  std::int64_t i = 0;
  double f = 0.0;
  std::string s;
  bool b = false;
  std::vector<TomlValue> arr;
  int line = 0;

  double as_double(const std::string& key) const {
    if (kind == Kind::Float) return f;
    if (kind == Kind::Int) return static_cast<double>(i);
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      ") must be a number");
  }
  std::int64_t as_int(const std::string& key) const {
    if (kind == Kind::Int) return i;
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      ") must be an integer");
  }
  const std::string& as_string(const std::string& key) const {
    if (kind == Kind::Str) return s;
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      ") must be a string");
  }
  bool as_bool(const std::string& key) const {
    if (kind == Kind::Bool) return b;
    throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                      ") must be a boolean");
  }
  std::vector<double> as_double_array(const std::string& key) const {
    if (kind != Kind::Array)
      throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                        ") must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const TomlValue& v : arr) out.push_back(v.as_double(key));
    return out;
  }
  std::vector<std::int64_t> as_int_array(const std::string& key) const {
    if (kind != Kind::Array)
      throw ConfigError("config: key '" + key + "' (line " + std::to_string(line) +
                        ") must be an array");
    std::vector<std::int64_t> out;
    out.reserve(arr.size());
    for (const TomlValue& v : arr) out.push_back(v.as_int(key));
    return out;
  }
};

/// sections[""] holds top-level keys; section tables are one level deep.
struct TomlDoc {
  std::map<std::string, std::map<std::string, TomlValue>> sections;

  const TomlValue* find(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }
};

namespace detail_toml {

inline bool is_bare_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') ++line;
    ++pos;
  }
  void skip_inline_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) advance();
  }
};

inline TomlValue parse_value(Cursor& c);

inline TomlValue parse_scalar(Cursor& c) {
  TomlValue v;
  v.line = c.line;
  if (c.peek() == '"') {
    c.advance();
    std::string s;
    while (!c.eof() && c.peek() != '"') {
      if (c.peek() == '\n') throw ConfigError("config: unterminated string at line " + std::to_string(v.line));
      if (c.peek() == '\\') {
        c.advance();
        if (c.eof()) break;
        const char e = c.peek();
        s += (e == 'n') ? '\n' : (e == 't') ? '\t' : e;
        c.advance();
        continue;
      }
      s += c.peek();
      c.advance();
    }
    if (c.eof()) throw ConfigError("config: unterminated string at line " + std::to_string(v.line));
    c.advance();
    v.kind = TomlValue::Kind::Str;
    v.s = std::move(s);
    return v;
  }
  std::string tok;
  while (!c.eof()) {
    const char ch = c.peek();
    if (ch == ' ' || ch == '\t' || ch == '\n' || ch == ',' || ch == ']' || ch == '#') break;
    tok += ch;
    c.advance();
  }
  if (tok.empty()) throw ConfigError("config: expected a value at line " + std::to_string(v.line));
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::Bool;
    v.b = (tok == "true");
    return v;
  }
  const bool looks_float = tok.find_first_of(".eE") != std::string::npos ||
                           tok == "inf" || tok == "-inf" || tok == "nan";
  std::size_t used = 0;
  try {
    if (looks_float) {
      v.kind = TomlValue::Kind::Float;
      v.f = std::stod(tok, &used);
    } else {
      v.kind = TomlValue::Kind::Int;
      v.i = std::stoll(tok, &used);
    }
  } catch (const std::exception&) {
    throw ConfigError("config: malformed value '" + tok + "' at line " + std::to_string(v.line));
  }
  if (used != tok.size())
    throw ConfigError("config: malformed value '" + tok + "' at line " + std::to_string(v.line));
  return v;
}

inline TomlValue parse_value(Cursor& c) {
  c.skip_inline_ws();
  if (c.eof()) throw ConfigError("config: expected a value at line " + std::to_string(c.line));
  if (c.peek() != '[') return parse_scalar(c);
  TomlValue v;
  v.kind = TomlValue::Kind::Array;
  v.line = c.line;
  c.advance();  // '['
  while (true) {
    // allow newlines and comments inside arrays
    while (!c.eof() && (c.peek() == ' ' || c.peek() == '\t' || c.peek() == '\n' || c.peek() == '#')) {
      if (c.peek() == '#') {
        while (!c.eof() && c.peek() != '\n') c.advance();
      } else {
        c.advance();
      }
    }
    if (c.eof()) throw ConfigError("config: unterminated array at line " + std::to_string(v.line));
    if (c.peek() == ']') {
      c.advance();
      break;
    }
    v.arr.push_back(parse_value(c));
    while (!c.eof() && (c.peek() == ' ' || c.peek() == '\t' || c.peek() == '\n')) c.advance();
    if (!c.eof() && c.peek() == ',') c.advance();
  }
  return v;
}

}  // namespace detail_toml

/// Strict parser for the TOML subset used by scenario configs: single-level
/// [section] tables, bare keys, strings, integers, floats, booleans and flat
/// arrays, with # comments. Duplicate keys are rejected.
inline TomlDoc parse_toml(const std::string& text) {
  TomlDoc doc;
  doc.sections[""];
  std::string section;
  detail_toml::Cursor c{text};
  while (!c.eof()) {
    c.skip_inline_ws();
    if (c.eof()) break;
    const char ch = c.peek();
    if (ch == '\n') {
      c.advance();
      continue;
    }
    if (ch == '#') {
      while (!c.eof() && c.peek() != '\n') c.advance();
      continue;
    }
    if (ch == '[') {
      const int line = c.line;
      c.advance();
      std::string name;
      while (!c.eof() && detail_toml::is_bare_char(c.peek())) {
        name += c.peek();
        c.advance();
      }
      if (c.eof() || c.peek() != ']' || name.empty())
        throw ConfigError("config: malformed section header at line " + std::to_string(line));
      c.advance();
      section = name;
      doc.sections[section];
      c.skip_inline_ws();
      if (!c.eof() && c.peek() == '#')
        while (!c.eof() && c.peek() != '\n') c.advance();
      if (!c.eof() && c.peek() != '\n')
        throw ConfigError("config: trailing characters after section header at line " +
                          std::to_string(line));
      continue;
    }
    // key = value
    const int line = c.line;
    std::string key;
    while (!c.eof() && detail_toml::is_bare_char(c.peek())) {
      key += c.peek();
      c.advance();
    }
    if (key.empty())
      throw ConfigError("config: expected a key at line " + std::to_string(line));
    c.skip_inline_ws();
    if (c.eof() || c.peek() != '=')
      throw ConfigError("config: expected '=' after key '" + key + "' at line " +
                        std::to_string(line));
    c.advance();
    TomlValue v = detail_toml::parse_value(c);
    c.skip_inline_ws();
    if (!c.eof() && c.peek() == '#')
      while (!c.eof() && c.peek() != '\n') c.advance();
    if (!c.eof() && c.peek() != '\n')
      throw ConfigError("config: trailing characters after value of '" + key + "' at line " +
                        std::to_string(line));
    auto& table = doc.sections[section];
    if (table.count(key))
      throw ConfigError("config: duplicate key '" + (section.empty() ? key : section + "." + key) +
                        "' at line " + std::to_string(line));
    table[key] = std::move(v);
  }
  return doc;
}

}  // namespace g2flow
