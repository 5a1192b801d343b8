#pragma once

namespace pestbench {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace pestbench
