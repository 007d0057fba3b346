#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netprof {

// First bytes of the client stream are not an HTTP request line;
// the caller should try TLS next.
struct NotHttpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HttpTransaction {
  std::string method;
  std::optional<std::string> host;
  std::optional<std::string> user_agent;
  int request_cookie_count = 0;
  std::optional<int> response_status;
  std::optional<std::string> response_content_type;         // raw header value
  std::optional<std::string> response_content_encoding;
  std::optional<std::string> response_content_disposition;
  std::optional<std::vector<uint8_t>> response_body;
};

// Pipelined transactions paired in order. Chunked bodies are
// de-chunked; parsing stops at malformed framing keeping what
// completed.
std::vector<HttpTransaction> parse_http(const std::vector<uint8_t>& client_bytes,
                                        const std::vector<uint8_t>& server_bytes);

// "Android <digits[.digits[.digits]]>" token, if any.
std::optional<std::string> parse_user_agent_os(const std::string& user_agent);

// true when the stream opens with a plausible HTTP request line
bool looks_like_http_request(const std::vector<uint8_t>& client_bytes);

// "text/html; charset=utf-8" -> "text/html"
std::string media_type(const std::string& content_type_value);

}  // namespace netprof
