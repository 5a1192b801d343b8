#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pestbench {

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::string& path);

// FNV-1a, used to derive per-scenario RNG sub-streams from string labels.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace pestbench
