#include "doctest.h"

#include "netprof/dpi.hpp"

using namespace netprof;

namespace {

HttpTransaction html_response(const std::string& body, bool gzipped = false) {
  HttpTransaction t;
  t.method = "GET";
  t.response_status = 200;
  t.response_content_type = "text/html";
  std::vector<uint8_t> b(body.begin(), body.end());
  if (gzipped) {
    t.response_content_encoding = "gzip";
    b = gzip_compress(b);
  }
  t.response_body = b;
  return t;
}

}  // namespace

TEST_CASE("password form detection") {
  auto scan = dpi_scan({html_response(
      "<html><body><form action='/l'><input type=\"password\" name=\"pw\"></form></body></html>")});
  CHECK(scan.form_count == 1);
  CHECK(scan.has_password_field);
  CHECK(!scan.has_username_field);
}

TEST_CASE("gzip bodies are inflated first") {
  std::string two_forms =
      "<html><form><input name='user_name'></form>"
      "<form><input type='email' name='m'></form></html>";
  auto gz = dpi_scan({html_response(two_forms, true)});
  CHECK(gz.form_count == 2);
  CHECK(gz.has_username_field);
  CHECK(gz.has_email_field);

  // gzip transparency: same result as the plain body
  auto plain = dpi_scan({html_response(two_forms, false)});
  CHECK(gz.form_count == plain.form_count);
  CHECK(gz.has_email_field == plain.has_email_field);
  CHECK(gz.has_username_field == plain.has_username_field);
  CHECK(gz.has_password_field == plain.has_password_field);
  CHECK(gz.downloaded_file_count == plain.downloaded_file_count);
}

TEST_CASE("attachment disposition counts a download") {
  HttpTransaction t;
  t.method = "GET";
  t.response_status = 200;
  t.response_content_disposition = "attachment; filename=a.pdf";
  auto scan = dpi_scan({t});
  CHECK(scan.downloaded_file_count == 1);
  REQUIRE(scan.downloaded_file_types.count("pdf"));
  CHECK(scan.downloaded_file_types.at("pdf") == 1);
}

TEST_CASE("binary content types count as downloads without disposition") {
  HttpTransaction t;
  t.method = "GET";
  t.response_content_type = "application/zip";
  auto scan = dpi_scan({t});
  CHECK(scan.downloaded_file_count == 1);
  CHECK(scan.downloaded_file_types.count("zip"));

  HttpTransaction u;
  u.response_content_type = "application/octet-stream";
  u.response_content_disposition = "attachment; filename=\"tool.apk\"";
  auto scan2 = dpi_scan({u});
  CHECK(scan2.downloaded_file_count == 1);
  CHECK(scan2.downloaded_file_types.count("apk"));  // extension beats octet-stream
}

TEST_CASE("email address appears in body text") {
  auto scan = dpi_scan({html_response("<html><p>contact us at help@example.org</p></html>")});
  CHECK(scan.has_email_field);
  CHECK(scan.form_count == 0);
}

TEST_CASE("inputs outside forms are ignored") {
  auto scan = dpi_scan({html_response("<html><input type='password' name='x'></html>")});
  CHECK(scan.form_count == 0);
  CHECK(!scan.has_password_field);
}

TEST_CASE("well-formed json and xml contribute type tags") {
  HttpTransaction j;
  j.response_content_type = "application/json";
  j.response_body = std::vector<uint8_t>{'{', '"', 'a', '"', ':', '1', '}'};
  auto scan = dpi_scan({j});
  CHECK(scan.downloaded_file_types.count("json"));
  CHECK(scan.downloaded_file_count == 0);

  HttpTransaction x;
  x.response_content_type = "application/xml";
  std::string xml = "<?xml version=\"1.0\"?><a><b/>text</a>";
  x.response_body = std::vector<uint8_t>(xml.begin(), xml.end());
  auto scan2 = dpi_scan({x});
  CHECK(scan2.downloaded_file_types.count("xml"));

  HttpTransaction bad;
  bad.response_content_type = "application/json";
  bad.response_body = std::vector<uint8_t>{'{', 'o', 'o', 'p'};
  CHECK(dpi_scan({bad}).downloaded_file_types.count("json") == 0);

  HttpTransaction badx;
  badx.response_content_type = "text/xml";
  std::string broken = "<a><b></a>";
  badx.response_body = std::vector<uint8_t>(broken.begin(), broken.end());
  CHECK(dpi_scan({badx}).downloaded_file_types.count("xml") == 0);
}

TEST_CASE("undecodable gzip counted in diagnostics") {
  HttpTransaction t;
  t.response_content_type = "text/html";
  t.response_content_encoding = "gzip";
  t.response_body = std::vector<uint8_t>{0x1f, 0x8b, 0xff, 0x00, 0x01};
  auto scan = dpi_scan({t});
  CHECK(scan.undecodable_bodies == 1);
  CHECK(scan.form_count == 0);
}

TEST_CASE("gzip round trip") {
  std::vector<uint8_t> data;
  for (int i = 0; i < 5000; ++i) data.push_back(static_cast<uint8_t>(i * 31));
  auto packed = gzip_compress(data);
  auto restored = gunzip(packed);
  REQUIRE(restored.has_value());
  CHECK(*restored == data);
  CHECK(!gunzip({1, 2, 3}).has_value());
}
