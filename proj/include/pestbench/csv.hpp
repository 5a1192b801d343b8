#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pestbench {

// RFC 4180 style CSV: quoted fields, "" escapes, embedded newlines inside
// quotes, CRLF or LF row endings, optional UTF-8 BOM. Rows may have
// differing field counts; callers validate shape. Throws MalformedFileError
// on an unterminated quote, with the row number in the message.
std::vector<std::vector<std::string>> parse_csv(std::string_view content,
                                                std::string_view source_name);

std::vector<std::vector<std::string>> read_csv_file(const std::string& path);

// Quotes a field when it contains a delimiter, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace pestbench
