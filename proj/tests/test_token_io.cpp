#include <string>

#include "doctest.h"
#include "pagefuse/token_io.hpp"

using namespace pagefuse;

TEST_SUITE("token_io") {

TEST_CASE("single page parses with boxes intact") {
  auto pages = parse_token_text(
      "PAGE p1 100 50\n"
      "hello 10 5 30 12\n"
      "world 32 5 60 12\n");
  REQUIRE(pages.size() == 1);
  CHECK(pages[0].page_id == "p1");
  CHECK(pages[0].width == 100);
  CHECK(pages[0].height == 50);
  REQUIRE(pages[0].tokens.size() == 2);
  CHECK(pages[0].tokens[0].text == "hello");
  CHECK(pages[0].tokens[0].box == Box{10, 5, 30, 12});
  CHECK(pages[0].tokens[1].index == 1);
  CHECK(pages[0].dropped == 0);
}

TEST_CASE("escaped spaces round-trip") {
  CHECK(escape_token_text("a b") == "a\\sb");
  CHECK(unescape_token_text("a\\sb") == "a b");
  CHECK(unescape_token_text(escape_token_text("new york")) == "new york");
  auto pages = parse_token_text("PAGE p 10 10\nnew\\syork 0 0 5 5\n");
  CHECK(pages[0].tokens[0].text == "new york");
}

TEST_CASE("boxes clipped to the page; empty clips dropped and counted") {
  auto pages = parse_token_text(
      "PAGE p 20 20\n"
      "edge -5 -5 10 10\n"
      "gone 25 25 30 30\n");
  REQUIRE(pages[0].tokens.size() == 1);
  CHECK(pages[0].tokens[0].box == Box{0, 0, 10, 10});
  CHECK(pages[0].dropped == 1);
}

TEST_CASE("errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_token_text("PAGE p 10 10\nbad 1 2 3\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_AS(parse_token_text("hello 0 0 1 1\n"), std::runtime_error);  // token before PAGE
  CHECK_THROWS_AS(parse_token_text("PAGE p -10 10\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_token_text("PAGE p 10 10\nPAGE p 10 10\n"), std::runtime_error);
}

TEST_CASE("write/parse round-trip") {
  auto pages = parse_token_text(
      "PAGE a 64 64\n"
      "foo\\sbar 1 2 9 6\n"
      "baz 10 2 20 6\n"
      "PAGE b 32 32\n");
  std::string path = "roundtrip_tokens.txt";
  write_token_file(path, pages);
  auto again = parse_token_file(path);
  REQUIRE(again.size() == 2);
  CHECK(again[0].tokens.size() == 2);
  CHECK(again[0].tokens[0].text == "foo bar");
  CHECK(again[0].tokens[1].box == pages[0].tokens[1].box);
  CHECK(again[1].tokens.empty());
}

}  // TEST_SUITE
