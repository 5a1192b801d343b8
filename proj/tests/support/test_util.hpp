#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>

#include "pestbench/text.hpp"

namespace pestbench::testutil {

inline std::string fixture_path(const std::string& relative) {
  return std::string(PESTBENCH_SOURCE_DIR) + "/" + relative;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path_ = base / ("pestbench_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

  std::string write(const std::string& name, std::string_view content) const {
    auto file = path_ / name;
    std::filesystem::create_directories(file.parent_path());
    write_text_file(file.string(), content);
    return file.string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace pestbench::testutil
