#include "netprof/http_parser.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "netprof/util.hpp"

namespace netprof {

namespace {

struct Cursor {
  const uint8_t* data;
  size_t size;
  size_t pos = 0;

  bool eof() const { return pos >= size; }
  size_t remaining() const { return size - pos; }

  // reads up to CRLF (or bare LF); false when no line terminator is left
  bool read_line(std::string& out) {
    out.clear();
    size_t i = pos;
    while (i < size && data[i] != '\n') ++i;
    if (i >= size) return false;
    size_t end = i;
    if (end > pos && data[end - 1] == '\r') --end;
    out.assign(reinterpret_cast<const char*>(data) + pos, end - pos);
    pos = i + 1;
    return true;
  }

  bool read_bytes(size_t n, std::vector<uint8_t>& out) {
    if (remaining() < n) return false;
    out.insert(out.end(), data + pos, data + pos + n);
    pos += n;
    return true;
  }
};

struct Headers {
  std::vector<std::pair<std::string, std::string>> fields;

  std::optional<std::string> get(std::string_view name) const {
    for (const auto& [k, v] : fields)
      if (k.size() == name.size() && starts_with_ci(k, name)) return v;
    return std::nullopt;
  }
};

bool parse_headers(Cursor& c, Headers& out) {
  std::string line;
  while (true) {
    if (!c.read_line(line)) return false;
    if (line.empty()) return true;
    auto colon = line.find(':');
    if (colon == std::string::npos || colon == 0) return false;
    out.fields.emplace_back(trim(line.substr(0, colon)), trim(line.substr(colon + 1)));
  }
}

bool is_token(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '!' ||
          c == '#' || c == '$' || c == '%' || c == '&' || c == '\'' || c == '*' || c == '+' ||
          c == '.' || c == '^' || c == '`' || c == '|' || c == '~'))
      return false;
  }
  return true;
}

bool valid_http_version(const std::string& s) {
  return s.size() == 8 && s.rfind("HTTP/", 0) == 0 && std::isdigit(static_cast<unsigned char>(s[5])) &&
         s[6] == '.' && std::isdigit(static_cast<unsigned char>(s[7]));
}

bool split_start_line(const std::string& line, std::string& a, std::string& b, std::string& c3) {
  auto sp1 = line.find(' ');
  if (sp1 == std::string::npos) return false;
  auto sp2 = line.find(' ', sp1 + 1);
  if (sp2 == std::string::npos) return false;
  a = line.substr(0, sp1);
  b = line.substr(sp1 + 1, sp2 - sp1 - 1);
  c3 = line.substr(sp2 + 1);
  return !a.empty() && !b.empty() && !c3.empty();
}

// de-chunks a Transfer-Encoding: chunked body; false on bad framing
bool read_chunked(Cursor& c, std::vector<uint8_t>& body) {
  std::string line;
  while (true) {
    if (!c.read_line(line)) return false;
    std::string sz = line.substr(0, line.find(';'));
    size_t len = 0;
    if (trim(sz).empty()) return false;
    for (char ch : trim(sz)) {
      if (!std::isxdigit(static_cast<unsigned char>(ch))) return false;
      len = len * 16 + static_cast<size_t>(std::isdigit(static_cast<unsigned char>(ch))
                                               ? ch - '0'
                                               : std::tolower(static_cast<unsigned char>(ch)) - 'a' + 10);
    }
    if (len == 0) {
      // trailers until blank line
      while (c.read_line(line)) {
        if (line.empty()) return true;
      }
      return false;
    }
    if (!c.read_bytes(len, body)) return false;
    if (!c.read_line(line) || !line.empty()) return false;
  }
}

struct Request {
  std::string method;
  Headers headers;
};

bool parse_request(Cursor& c, Request& out, bool first) {
  std::string line;
  size_t mark = c.pos;
  bool had_line = c.read_line(line);
  if (!had_line) {
    // no terminator left; judge the remaining bytes as a request line
    line.assign(reinterpret_cast<const char*>(c.data) + c.pos, c.size - c.pos);
    c.pos = mark;
  }
  std::string method, target, version;
  if (!split_start_line(line, method, target, version) || !is_token(method) ||
      !valid_http_version(version)) {
    if (first) throw NotHttpError("not an HTTP request line");
    c.pos = mark;
    return false;
  }
  if (!had_line) return false;  // plausible but incomplete
  out.method = method;
  if (!parse_headers(c, out.headers)) {
    c.pos = mark;
    return false;
  }
  // request bodies: Content-Length or chunked
  std::vector<uint8_t> body;
  if (auto te = out.headers.get("Transfer-Encoding");
      te && to_lower(*te).find("chunked") != std::string::npos) {
    if (!read_chunked(c, body)) {
      c.pos = mark;
      return false;
    }
  } else if (auto cl = out.headers.get("Content-Length")) {
    char* end = nullptr;
    long n = std::strtol(cl->c_str(), &end, 10);
    if (!end || *end != '\0' || n < 0 || !c.read_bytes(static_cast<size_t>(n), body)) {
      c.pos = mark;
      return false;
    }
  }
  return true;
}

struct Response {
  int status = 0;
  Headers headers;
  std::vector<uint8_t> body;
  bool ok = false;
};

bool parse_response(Cursor& c, Response& out, const std::string& req_method) {
  std::string line;
  size_t mark = c.pos;
  if (!c.read_line(line)) {
    c.pos = mark;
    return false;
  }
  std::string version, code, reason;
  auto sp1 = line.find(' ');
  if (sp1 == std::string::npos) {
    c.pos = mark;
    return false;
  }
  version = line.substr(0, sp1);
  std::string rest = line.substr(sp1 + 1);
  auto sp2 = rest.find(' ');
  code = sp2 == std::string::npos ? rest : rest.substr(0, sp2);
  if (!valid_http_version(version) || code.size() != 3 ||
      !std::all_of(code.begin(), code.end(),
                   [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
    c.pos = mark;
    return false;
  }
  out.status = std::stoi(code);
  if (!parse_headers(c, out.headers)) {
    c.pos = mark;
    return false;
  }
  bool head = req_method == "HEAD";
  bool no_body = head || out.status / 100 == 1 || out.status == 204 || out.status == 304;
  if (!no_body) {
    if (auto te = out.headers.get("Transfer-Encoding");
        te && to_lower(*te).find("chunked") != std::string::npos) {
      if (!read_chunked(c, out.body)) {
        c.pos = mark;
        return false;
      }
    } else if (auto cl = out.headers.get("Content-Length")) {
      char* end = nullptr;
      long n = std::strtol(cl->c_str(), &end, 10);
      if (!end || *end != '\0' || n < 0 || !c.read_bytes(static_cast<size_t>(n), out.body)) {
        c.pos = mark;
        return false;
      }
    } else {
      // close-delimited: everything that is left
      out.body.assign(c.data + c.pos, c.data + c.size);
      c.pos = c.size;
    }
  }
  out.ok = true;
  return true;
}

int count_cookies(const Headers& h) {
  int n = 0;
  for (const auto& [k, v] : h.fields) {
    if (k.size() == 6 && starts_with_ci(k, "Cookie")) {
      for (const auto& part : split(v, ';'))
        if (part.find('=') != std::string::npos) ++n;
    }
  }
  return n;
}

}  // namespace

bool looks_like_http_request(const std::vector<uint8_t>& client_bytes) {
  if (client_bytes.empty()) return false;
  size_t n = std::min<size_t>(client_bytes.size(), 256);
  std::string head(reinterpret_cast<const char*>(client_bytes.data()), n);
  auto eol = head.find('\n');
  if (eol == std::string::npos) {
    if (client_bytes.size() > 256) return false;
    eol = head.size();
  }
  std::string line = head.substr(0, eol);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::string m, t, v;
  return split_start_line(line, m, t, v) && is_token(m) && valid_http_version(v);
}

std::vector<HttpTransaction> parse_http(const std::vector<uint8_t>& client_bytes,
                                        const std::vector<uint8_t>& server_bytes) {
  std::vector<HttpTransaction> out;
  if (client_bytes.empty()) return out;

  Cursor creq{client_bytes.data(), client_bytes.size()};
  std::vector<Request> requests;
  bool first = true;
  while (!creq.eof()) {
    Request r;
    if (!parse_request(creq, r, first)) break;
    first = false;
    requests.push_back(std::move(r));
  }

  Cursor cresp{server_bytes.data(), server_bytes.size()};
  for (size_t i = 0; i < requests.size(); ++i) {
    const Request& req = requests[i];
    HttpTransaction t;
    t.method = req.method;
    t.host = req.headers.get("Host");
    t.user_agent = req.headers.get("User-Agent");
    t.request_cookie_count = count_cookies(req.headers);

    Response resp;
    if (!cresp.eof() && parse_response(cresp, resp, req.method)) {
      t.response_status = resp.status;
      t.response_content_type = resp.headers.get("Content-Type");
      t.response_content_encoding = resp.headers.get("Content-Encoding");
      t.response_content_disposition = resp.headers.get("Content-Disposition");
      t.response_body = std::move(resp.body);
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<std::string> parse_user_agent_os(const std::string& user_agent) {
  static const std::regex re(R"(Android ([0-9]+(?:\.[0-9]+){0,2}))");
  std::smatch m;
  if (std::regex_search(user_agent, m, re)) return "Android " + m[1].str();
  return std::nullopt;
}

std::string media_type(const std::string& content_type_value) {
  std::string v = content_type_value.substr(0, content_type_value.find(';'));
  return to_lower(trim(v));
}

}  // namespace netprof
