#include "doctest.h"

#include "netprof/http_parser.hpp"

using namespace netprof;

namespace {
std::vector<uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }
}  // namespace

TEST_CASE("cookie counting and content type") {
  auto txns = parse_http(
      bytes("GET /index.html HTTP/1.1\r\n"
            "Host: news.example.org\r\n"
            "Cookie: a=1; b=2\r\n"
            "\r\n"),
      bytes("HTTP/1.1 200 OK\r\n"
            "Content-Type: text/html\r\n"
            "Content-Length: 5\r\n"
            "\r\n"
            "hello"));
  REQUIRE(txns.size() == 1);
  CHECK(txns[0].method == "GET");
  CHECK(txns[0].host == "news.example.org");
  CHECK(txns[0].request_cookie_count == 2);
  CHECK(txns[0].response_status == 200);
  CHECK(txns[0].response_content_type == "text/html");
  REQUIRE(txns[0].response_body.has_value());
  CHECK(txns[0].response_body->size() == 5);
}

TEST_CASE("empty streams give empty list") {
  CHECK(parse_http({}, {}).empty());
}

TEST_CASE("two pipelined transactions pair in order") {
  auto txns = parse_http(
      bytes("GET /a HTTP/1.1\r\nHost: one.example\r\n\r\n"
            "GET /b HTTP/1.1\r\nHost: two.example\r\n\r\n"),
      bytes("HTTP/1.1 200 OK\r\nContent-Length: 1\r\n\r\nA"
            "HTTP/1.1 404 Not Found\r\nContent-Length: 1\r\n\r\nB"));
  REQUIRE(txns.size() == 2);
  CHECK(txns[0].host == "one.example");
  CHECK(txns[0].response_status == 200);
  CHECK(txns[1].host == "two.example");
  CHECK(txns[1].response_status == 404);
}

TEST_CASE("chunked responses are de-chunked") {
  auto txns = parse_http(
      bytes("GET / HTTP/1.1\r\nHost: h\r\n\r\n"),
      bytes("HTTP/1.1 200 OK\r\n"
            "Transfer-Encoding: chunked\r\n"
            "\r\n"
            "4\r\nWiki\r\n"
            "5\r\npedia\r\n"
            "0\r\n\r\n"));
  REQUIRE(txns.size() == 1);
  REQUIRE(txns[0].response_body.has_value());
  CHECK(std::string(txns[0].response_body->begin(), txns[0].response_body->end()) == "Wikipedia");
}

TEST_CASE("NotHttp on non-request bytes") {
  CHECK_THROWS_AS(parse_http(bytes("\x16\x03\x01 junk"), {}), NotHttpError);
  CHECK_THROWS_AS(parse_http(bytes("totally not http\r\n\r\n"), {}), NotHttpError);
}

TEST_CASE("malformed framing keeps completed transactions") {
  auto txns = parse_http(
      bytes("GET /ok HTTP/1.1\r\nHost: h\r\n\r\n"
            "GET /broken HTTP/1.1\r\nContent-Length: 99999\r\n\r\nshort"),
      bytes("HTTP/1.1 200 OK\r\nContent-Length: 0\r\n\r\n"));
  REQUIRE(txns.size() == 1);
  CHECK(txns[0].host == "h");
}

TEST_CASE("missing response leaves fields unset") {
  auto txns = parse_http(bytes("GET / HTTP/1.1\r\nHost: h\r\nCookie: x\r\n\r\n"), {});
  REQUIRE(txns.size() == 1);
  CHECK(txns[0].request_cookie_count == 0);  // "x" has no '='
  CHECK(!txns[0].response_status.has_value());
  CHECK(!txns[0].response_body.has_value());
}

TEST_CASE("user agent OS extraction") {
  CHECK(parse_user_agent_os("Dalvik/2.1.0 (Linux; U; Android 5.0.1; Nexus 5 Build/LRX22C)") ==
        "Android 5.0.1");
  CHECK(!parse_user_agent_os("curl/7.1").has_value());
  CHECK(parse_user_agent_os("Mozilla/5.0 (Linux; Android 4.4.2; SM-T230 Build/KOT49H)") ==
        "Android 4.4.2");
  CHECK(parse_user_agent_os("Foo Android 7") == "Android 7");
}

TEST_CASE("media type strips parameters") {
  CHECK(media_type("text/HTML; charset=utf-8") == "text/html");
  CHECK(media_type("application/json") == "application/json");
}

TEST_CASE("header fields round trip through serialization") {
  // re-serialize from the parsed fields and parse again
  std::string host = "round.example";
  int cookies = 3;
  std::string req = "GET / HTTP/1.1\r\nHost: " + host + "\r\nCookie: a=1; b=2; c=3\r\n\r\n";
  std::string resp =
      "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: 2\r\n\r\n{}";
  auto first = parse_http(bytes(req), bytes(resp));
  REQUIRE(first.size() == 1);

  std::string req2 = "GET / HTTP/1.1\r\nHost: " + *first[0].host + "\r\nCookie: a=1; b=2; c=3\r\n\r\n";
  std::string resp2 = "HTTP/1.1 200 OK\r\nContent-Type: " + *first[0].response_content_type +
                      "\r\nContent-Length: 2\r\n\r\n{}";
  auto second = parse_http(bytes(req2), bytes(resp2));
  REQUIRE(second.size() == 1);
  CHECK(second[0].host == first[0].host);
  CHECK(second[0].request_cookie_count == cookies);
  CHECK(second[0].response_content_type == first[0].response_content_type);
}
