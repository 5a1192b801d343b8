#include "pestbench/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

namespace pestbench {
namespace toml {

namespace {

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw ConfigError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-' || c == '.';
}

class LineParser {
 public:
  LineParser(std::string_view text, std::string_view source, std::size_t line)
      : text_(text), source_(source), line_(line) {}

  void skip_spaces() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool at_end() {
    skip_spaces();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c, const std::string& context) {
    skip_spaces();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(source_, line_, "expected '" + std::string(1, c) + "' " + context);
    }
    ++pos_;
  }

  std::string parse_key() {
    skip_spaces();
    if (pos_ < text_.size() && text_[pos_] == '"') return parse_quoted_string();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_bare_key_char(text_[pos_])) ++pos_;
    if (pos_ == start) fail(source_, line_, "expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string parse_quoted_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size()) {
      char c = text_[pos_++];
      if (c == '"') return out;
      if (c == '\\') {
        if (pos_ >= text_.size()) break;
        char esc = text_[pos_++];
        switch (esc) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default:
            fail(source_, line_, std::string("unsupported escape '\\") + esc + "' in string");
        }
        continue;
      }
      out.push_back(c);
    }
    fail(source_, line_, "unterminated string");
  }

  Value parse_value() {
    skip_spaces();
    if (pos_ >= text_.size()) fail(source_, line_, "expected a value");
    char c = text_[pos_];
    if (c == '"') return Value::string(parse_quoted_string());
    if (c == '[') return parse_array();
    if (text_.substr(pos_, 4) == "true" && !is_bare_key_char(peek_at(pos_ + 4))) {
      pos_ += 4;
      return Value::boolean(true);
    }
    if (text_.substr(pos_, 5) == "false" && !is_bare_key_char(peek_at(pos_ + 5))) {
      pos_ += 5;
      return Value::boolean(false);
    }
    return parse_number();
  }

 private:
  char peek_at(std::size_t i) const { return i < text_.size() ? text_[i] : '\0'; }

  Value parse_array() {
    ++pos_;  // '['
    std::vector<Value> items;
    skip_spaces();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return Value::array(std::move(items));
    }
    while (true) {
      items.push_back(parse_value());
      skip_spaces();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        skip_spaces();
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return Value::array(std::move(items));
        }
        continue;
      }
      if (pos_ < text_.size() && text_[pos_] == ']') {
        ++pos_;
        return Value::array(std::move(items));
      }
      fail(source_, line_, "expected ',' or ']' in array");
    }
  }

  Value parse_number() {
    std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
    bool is_float = false;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_float = true;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      } else if (c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    std::string digits;
    for (char c : token) {
      if (c != '_') digits.push_back(c);
    }
    if (digits.empty() || digits == "+" || digits == "-") {
      fail(source_, line_, "expected a value, got '" + std::string(text_.substr(start)) + "'");
    }
    if (is_float) {
      char* end = nullptr;
      double v = std::strtod(digits.c_str(), &end);
      if (end == nullptr || *end != '\0') fail(source_, line_, "malformed number '" + token + "'");
      return Value::real(v);
    }
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      fail(source_, line_, "malformed integer '" + token + "'");
    }
    return Value::integer(v);
  }

  std::string_view text_;
  std::string_view source_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

Value Value::string(std::string v) {
  Value out;
  out.type_ = Type::String;
  out.str_ = std::move(v);
  return out;
}

Value Value::integer(std::int64_t v) {
  Value out;
  out.type_ = Type::Integer;
  out.int_ = v;
  return out;
}

Value Value::real(double v) {
  Value out;
  out.type_ = Type::Float;
  out.real_ = v;
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.type_ = Type::Boolean;
  out.bool_ = v;
  return out;
}

Value Value::array(std::vector<Value> v) {
  Value out;
  out.type_ = Type::Array;
  out.array_ = std::move(v);
  return out;
}

const std::string& Value::as_string() const {
  if (type_ != Type::String) throw ConfigError("config value is not a string");
  return str_;
}

std::int64_t Value::as_int() const {
  if (type_ != Type::Integer) throw ConfigError("config value is not an integer");
  return int_;
}

double Value::as_double() const {
  if (type_ == Type::Integer) return static_cast<double>(int_);
  if (type_ != Type::Float) throw ConfigError("config value is not a number");
  return real_;
}

bool Value::as_bool() const {
  if (type_ != Type::Boolean) throw ConfigError("config value is not a boolean");
  return bool_;
}

const std::vector<Value>& Value::as_array() const {
  if (type_ != Type::Array) throw ConfigError("config value is not an array");
  return array_;
}

const Value& Table::at(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

const Value* Table::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

void Table::set(const std::string& key, Value value) { entries_[key] = std::move(value); }

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  return v == nullptr ? fallback : v->as_string();
}

std::int64_t Table::get_int(const std::string& key, std::int64_t fallback) const {
  const Value* v = find(key);
  return v == nullptr ? fallback : v->as_int();
}

double Table::get_double(const std::string& key, double fallback) const {
  const Value* v = find(key);
  return v == nullptr ? fallback : v->as_double();
}

bool Table::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  return v == nullptr ? fallback : v->as_bool();
}

const Table* Document::table(const std::string& name) const {
  auto it = tables.find(name);
  return it == tables.end() ? nullptr : &it->second;
}

const std::vector<Table>* Document::array_of_tables(const std::string& name) const {
  auto it = table_arrays.find(name);
  return it == table_arrays.end() ? nullptr : &it->second;
}

Document parse(std::string_view text, std::string_view source_name) {
  Document doc;
  Table* current = &doc.root;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineParser p(line, source_name, line_no);
    if (p.at_end()) continue;

    if (p.peek() == '[') {
      p.expect('[', "to open a table header");
      bool is_array = false;
      if (p.peek() == '[') {
        p.expect('[', "");
        is_array = true;
      }
      std::string name = p.parse_key();
      p.expect(']', "to close the table header");
      if (is_array) p.expect(']', "to close the table header");
      if (!p.at_end()) fail(source_name, line_no, "unexpected text after table header");
      if (is_array) {
        doc.table_arrays[name].emplace_back();
        current = &doc.table_arrays[name].back();
      } else {
        current = &doc.tables[name];
      }
      continue;
    }

    std::string key = p.parse_key();
    p.expect('=', "after key '" + key + "'");
    Value value = p.parse_value();
    if (!p.at_end()) fail(source_name, line_no, "unexpected text after value for '" + key + "'");
    if (current->contains(key)) fail(source_name, line_no, "duplicate key '" + key + "'");
    current->set(key, std::move(value));
  }
  return doc;
}

Document parse_file(const std::string& path) {
  return parse(read_text_file(path), path);
}

}  // namespace toml
}  // namespace pestbench
