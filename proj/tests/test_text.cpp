#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

using namespace pestbench;

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  hello  ") == "hello");
  CHECK(trim("\t a b \r\n") == "a b");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
  CHECK(trim("x") == "x");
}

TEST_CASE("to_lower is ASCII-only") {
  CHECK(to_lower("Grain APHID") == "grain aphid");
  CHECK(to_lower("a-Z_0 9") == "a-z_0 9");
}

TEST_CASE("normalize_name collapses inner whitespace") {
  CHECK(normalize_name("  Grain   Aphid ") == "grain aphid");
  CHECK(normalize_name("Pollen\tBeetle") == "pollen beetle");
  CHECK(normalize_name("one two") == "one two");
}

TEST_CASE("iequals compares case-insensitively") {
  CHECK(iequals("Wheat", "wheat"));
  CHECK(iequals("", ""));
  CHECK_FALSE(iequals("wheat", "wheat "));
  CHECK_FALSE(iequals("oats", "oat"));
}

TEST_CASE("ifind locates needles regardless of case") {
  CHECK(ifind("Action is REQUIRED", "required") == 10);
  CHECK(ifind("abc", "") == 0);
  CHECK(ifind("abc", "d") == std::string_view::npos);
  CHECK(ifind("abc", "abcd") == std::string_view::npos);
}

TEST_CASE("format_decimal renders shortest plain form") {
  CHECK(format_decimal(12.0) == "12");
  CHECK(format_decimal(2.5) == "2.5");
  CHECK(format_decimal(0.25) == "0.25");
  CHECK(format_decimal(250.0) == "250");
  CHECK(format_decimal(0.0) == "0");
  CHECK(format_decimal(-0.0) == "0");
  CHECK(format_decimal(10.5) == "10.5");
}

TEST_CASE("format_fixed1 keeps exactly one decimal") {
  CHECK(format_fixed1(18.0) == "18.0");
  CHECK(format_fixed1(18.37) == "18.4");
  CHECK(format_fixed1(-3.05) == "-3.0");
}

TEST_CASE("slugify produces lowercase dashed identifiers") {
  CHECK(slugify("Grain Aphid") == "grain-aphid");
  CHECK(slugify("  Orange wheat blossom midge ") == "orange-wheat-blossom-midge");
  CHECK(slugify("a--b") == "a-b");
}

TEST_CASE("text file round trip and missing file error") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "pestbench_text_roundtrip.txt";
  write_text_file(path.string(), "line one\nline two\n");
  CHECK(read_text_file(path.string()) == "line one\nline two\n");
  fs::remove(path);
  CHECK_THROWS_AS(read_text_file(path.string()), IoError);
}
