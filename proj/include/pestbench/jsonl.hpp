#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace pestbench {

struct JsonlLine {
  std::size_t line_number = 0;  // 1-based
  nlohmann::json value;
};

// Parses one JSON document per non-empty line. Throws SchemaError naming the
// source and line on malformed JSON.
std::vector<JsonlLine> parse_jsonl(const std::string& content, const std::string& source_name);
std::vector<JsonlLine> read_jsonl_file(const std::string& path);

// Serializes with sorted keys and no extra whitespace, one line per record.
std::string dump_jsonl_line(const nlohmann::json& value);

}  // namespace pestbench
