#include <doctest.h>

#include "pestbench/csv.hpp"
#include "pestbench/errors.hpp"

using namespace pestbench;

TEST_CASE("parse_csv handles plain rows") {
  auto rows = parse_csv("a,b,c\n1,2,3\n", "test.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(rows[1] == std::vector<std::string>{"1", "2", "3"});
}

TEST_CASE("parse_csv handles quoting, escapes and embedded newlines") {
  auto rows = parse_csv("pest,advice\n\"grain aphid\",\"rotate crops, use \"\"soft\"\" soaps\nand monitor\"\n",
                        "test.csv");
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[1].size() == 2);
  CHECK(rows[1][0] == "grain aphid");
  CHECK(rows[1][1] == "rotate crops, use \"soft\" soaps\nand monitor");
}

TEST_CASE("parse_csv accepts CRLF and missing final newline") {
  auto rows = parse_csv("a,b\r\nc,d", "test.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"c", "d"});
}

TEST_CASE("parse_csv strips a UTF-8 BOM") {
  auto rows = parse_csv("\xEF\xBB\xBFpest,value\n", "test.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == "pest");
}

TEST_CASE("parse_csv rejects an unterminated quote") {
  CHECK_THROWS_AS(parse_csv("a,\"open\n", "bad.csv"), MalformedFileError);
}

TEST_CASE("csv_escape quotes only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("csv escape and parse round trip") {
  std::string field = "complex, \"quoted\"\nmultiline";
  auto rows = parse_csv(csv_escape(field) + "\n", "rt.csv");
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].size() == 1);
  CHECK(rows[0][0] == field);
}
