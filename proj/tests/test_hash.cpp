#include <doctest.h>

#include <filesystem>

#include "pestbench/errors.hpp"
#include "pestbench/hash.hpp"
#include "pestbench/text.hpp"

using namespace pestbench;

TEST_CASE("sha256 known answers") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sha256_file_hex matches in-memory digest") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "pestbench_hash_probe.txt";
  write_text_file(path.string(), "abc");
  CHECK(sha256_file_hex(path.string()) == sha256_hex("abc"));
  fs::remove(path);
  CHECK_THROWS_AS(sha256_file_hex(path.string()), IoError);
}

TEST_CASE("fnv1a64 known answers") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}
