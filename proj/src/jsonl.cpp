#include "pestbench/jsonl.hpp"

#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

namespace pestbench {

std::vector<JsonlLine> parse_jsonl(const std::string& content, const std::string& source_name) {
  std::vector<JsonlLine> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string line = content.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = eol == std::string::npos ? content.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    nlohmann::json value = nlohmann::json::parse(line, nullptr, false);
    if (value.is_discarded()) {
      throw SchemaError(source_name + ":" + std::to_string(line_no) + ": malformed JSON line");
    }
    out.push_back({line_no, std::move(value)});
  }
  return out;
}

std::vector<JsonlLine> read_jsonl_file(const std::string& path) {
  return parse_jsonl(read_text_file(path), path);
}

std::string dump_jsonl_line(const nlohmann::json& value) {
  return value.dump();
}

}  // namespace pestbench
