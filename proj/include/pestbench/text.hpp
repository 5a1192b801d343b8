#pragma once

#include <string>
#include <string_view>

namespace pestbench {

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);

// Canonical key for pest and crop names: trimmed, lower-cased, inner
// whitespace runs collapsed to single spaces.
std::string normalize_name(std::string_view name);

bool iequals(std::string_view lhs, std::string_view rhs);

// Case-insensitive search; returns the byte offset of the match or npos.
std::size_t ifind(std::string_view haystack, std::string_view needle);

// Shortest decimal rendering: "12", "2.5", "0.25". Trailing zeros and a
// dangling decimal point are trimmed.
std::string format_decimal(double value);

// Fixed one-decimal rendering used for temperatures and latitudes.
std::string format_fixed1(double value);

std::string slugify(std::string_view name);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace pestbench
