#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pestbench {
namespace toml {

// Minimal TOML subset used for run configuration files: [tables],
// [[arrays of tables]], and key = value pairs where a value is a quoted
// string, integer, float, boolean, or a single-line array of scalars.
// Dotted table names are kept as written ("generation.ranges").

class Value {
 public:
  enum class Type { String, Integer, Float, Boolean, Array };

  static Value string(std::string v);
  static Value integer(std::int64_t v);
  static Value real(double v);
  static Value boolean(bool v);
  static Value array(std::vector<Value> v);

  Type type() const { return type_; }

  const std::string& as_string() const;
  std::int64_t as_int() const;
  double as_double() const;  // accepts integers too
  bool as_bool() const;
  const std::vector<Value>& as_array() const;

 private:
  Type type_ = Type::String;
  std::string str_;
  std::int64_t int_ = 0;
  double real_ = 0.0;
  bool bool_ = false;
  std::vector<Value> array_;
};

class Table {
 public:
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  const Value& at(const std::string& key) const;
  const Value* find(const std::string& key) const;
  void set(const std::string& key, Value value);

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, Value>& entries() const { return entries_; }

 private:
  std::map<std::string, Value> entries_;
};

struct Document {
  Table root;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> table_arrays;

  const Table* table(const std::string& name) const;
  const std::vector<Table>* array_of_tables(const std::string& name) const;
};

// Throws ConfigError with the source name and line number on bad input.
Document parse(std::string_view text, std::string_view source_name);
Document parse_file(const std::string& path);

}  // namespace toml
}  // namespace pestbench
