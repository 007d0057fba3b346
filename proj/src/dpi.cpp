#include "netprof/dpi.hpp"

#include <zlib.h>

#include <cctype>
#include <regex>
#include <set>

#include "netprof/util.hpp"

#include "json.hpp"

namespace netprof {

std::optional<std::vector<uint8_t>> gunzip(const std::vector<uint8_t>& data) {
  if (data.empty()) return std::nullopt;
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) return std::nullopt;  // gzip or zlib header
  std::vector<uint8_t> out;
  std::vector<uint8_t> buf(16384);
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  int rc = Z_OK;
  while (rc == Z_OK) {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc == Z_OK || rc == Z_STREAM_END)
      out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    if (out.size() > (64u << 20)) {  // decompression bomb guard
      inflateEnd(&zs);
      return std::nullopt;
    }
  }
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) return std::nullopt;
  return out;
}

std::vector<uint8_t> gzip_compress(const std::vector<uint8_t>& data) {
  z_stream zs{};
  deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY);
  std::vector<uint8_t> out(deflateBound(&zs, static_cast<uLong>(data.size())) + 32);
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  deflate(&zs, Z_FINISH);
  out.resize(out.size() - zs.avail_out);
  deflateEnd(&zs);
  return out;
}

namespace {

const std::set<std::string> kBinaryDownloadTypes = {
    "application/pdf",
    "application/zip",
    "application/octet-stream",
    "application/vnd.android.package-archive",
};

bool texty_type(const std::string& mime) {
  return mime.empty() || mime.rfind("text/", 0) == 0 || mime == "application/json" ||
         mime == "application/xml" || mime.find("+xml") != std::string::npos ||
         mime == "application/x-www-form-urlencoded";
}

// attribute value from a tag fragment; handles quoted and bare values
std::optional<std::string> attr_value(const std::string& tag, const std::string& attr) {
  std::string lower = to_lower(tag);
  std::string needle = attr + "=";
  size_t p = 0;
  while ((p = lower.find(needle, p)) != std::string::npos) {
    // require a non-name character before the attribute name
    if (p > 0 && (std::isalnum(static_cast<unsigned char>(lower[p - 1])) || lower[p - 1] == '-')) {
      p += needle.size();
      continue;
    }
    size_t v = p + needle.size();
    if (v >= lower.size()) return std::nullopt;
    char quote = lower[v];
    if (quote == '"' || quote == '\'') {
      size_t end = lower.find(quote, v + 1);
      if (end == std::string::npos) return std::nullopt;
      return lower.substr(v + 1, end - v - 1);
    }
    size_t end = v;
    while (end < lower.size() && !std::isspace(static_cast<unsigned char>(lower[end])) &&
           lower[end] != '>' && lower[end] != '/')
      ++end;
    return lower.substr(v, end - v);
  }
  return std::nullopt;
}

// every <tag ...> fragment of the given element name within [begin, end)
std::vector<std::string> find_tags(const std::string& html, const std::string& name, size_t begin,
                                   size_t end) {
  std::vector<std::string> out;
  std::string lower = to_lower(html);
  std::string open = "<" + name;
  size_t p = begin;
  while ((p = lower.find(open, p)) != std::string::npos && p < end) {
    size_t after = p + open.size();
    if (after < lower.size() && (std::isalnum(static_cast<unsigned char>(lower[after])))) {
      p = after;  // e.g. <formal...
      continue;
    }
    size_t close = html.find('>', p);
    if (close == std::string::npos || close > end) break;
    out.push_back(html.substr(p, close - p + 1));
    p = close + 1;
  }
  return out;
}

struct FormRegion {
  size_t begin, end;
};

std::vector<FormRegion> form_regions(const std::string& html) {
  std::vector<FormRegion> out;
  std::string lower = to_lower(html);
  size_t p = 0;
  while ((p = lower.find("<form", p)) != std::string::npos) {
    size_t after = p + 5;
    if (after < lower.size() && std::isalnum(static_cast<unsigned char>(lower[after]))) {
      p = after;
      continue;
    }
    size_t close = lower.find("</form", p);
    size_t end = close == std::string::npos ? html.size() : close;
    out.push_back({p, end});
    p = end + 1;
  }
  return out;
}

bool well_formed_xml(const std::string& text) {
  // tag-balance check; declarations, comments and self-closing tags ok
  std::vector<std::string> stack;
  size_t p = 0;
  bool saw_element = false;
  while (p < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[p]))) {
      ++p;
      continue;
    }
    if (text[p] != '<') {
      if (stack.empty() && saw_element) return false;  // trailing junk
      if (stack.empty() && !saw_element) return false; // leading junk
      ++p;
      continue;
    }
    if (text.compare(p, 4, "<!--") == 0) {
      size_t end = text.find("-->", p);
      if (end == std::string::npos) return false;
      p = end + 3;
      continue;
    }
    if (text.compare(p, 9, "<![CDATA[") == 0) {
      size_t end = text.find("]]>", p);
      if (end == std::string::npos) return false;
      p = end + 3;
      continue;
    }
    if (text.compare(p, 2, "<?") == 0 || text.compare(p, 2, "<!") == 0) {
      size_t end = text.find('>', p);
      if (end == std::string::npos) return false;
      p = end + 1;
      continue;
    }
    size_t end = text.find('>', p);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(p + 1, end - p - 1);
    if (tag.empty()) return false;
    if (tag[0] == '/') {
      std::string name = trim(tag.substr(1));
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      bool self_close = tag.back() == '/';
      if (self_close) tag.pop_back();
      std::string name = tag.substr(0, tag.find_first_of(" \t\r\n"));
      if (name.empty()) return false;
      saw_element = true;
      if (!self_close) stack.push_back(name);
    }
    p = end + 1;
  }
  return saw_element && stack.empty();
}

const std::regex& email_regex() {
  static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
  return re;
}

std::optional<std::string> disposition_filename_ext(const std::string& disposition) {
  std::string lower = to_lower(disposition);
  size_t p = lower.find("filename=");
  if (p == std::string::npos) return std::nullopt;
  std::string v = trim(disposition.substr(p + 9));
  if (!v.empty() && v.front() == '"') {
    auto endq = v.find('"', 1);
    v = endq == std::string::npos ? v.substr(1) : v.substr(1, endq - 1);
  } else {
    v = v.substr(0, v.find(';'));
  }
  auto dot = v.rfind('.');
  if (dot == std::string::npos || dot + 1 >= v.size()) return std::nullopt;
  return to_lower(trim(v.substr(dot + 1)));
}

}  // namespace

DpiScan dpi_scan(const std::vector<HttpTransaction>& transactions) {
  DpiScan scan;
  for (const auto& t : transactions) {
    std::string mime = t.response_content_type ? media_type(*t.response_content_type) : "";
    std::string disposition = t.response_content_disposition ? to_lower(*t.response_content_disposition) : "";
    bool attachment = disposition.rfind("attachment", 0) == 0;

    // download accounting needs headers only
    if (attachment || kBinaryDownloadTypes.count(mime)) {
      scan.downloaded_file_count++;
      std::optional<std::string> tag;
      auto slash = mime.find('/');
      if (slash != std::string::npos && slash + 1 < mime.size())
        tag = mime.substr(slash + 1);
      if (!tag || *tag == "octet-stream") {
        if (auto ext = disposition_filename_ext(disposition)) tag = ext;
      }
      scan.downloaded_file_types[tag ? *tag : "unknown"]++;
    }

    if (!t.response_body || t.response_body->empty()) continue;

    const std::vector<uint8_t>* body = &*t.response_body;
    std::vector<uint8_t> inflated;
    if (t.response_content_encoding &&
        to_lower(*t.response_content_encoding).find("gzip") != std::string::npos) {
      auto dec = gunzip(*body);
      if (!dec) {
        scan.undecodable_bodies++;
        continue;
      }
      inflated = std::move(*dec);
      body = &inflated;
    }

    bool is_html = mime == "text/html" || mime.empty();
    bool is_json = mime == "application/json" || mime == "text/json";
    bool is_xml = mime == "application/xml" || mime == "text/xml" ||
                  mime.find("+xml") != std::string::npos;

    std::string text(reinterpret_cast<const char*>(body->data()), body->size());

    if (is_html) {
      auto regions = form_regions(text);
      scan.form_count += static_cast<int>(regions.size());
      for (const auto& r : regions) {
        for (const auto& tag : find_tags(text, "input", r.begin, r.end)) {
          auto type = attr_value(tag, "type");
          auto name = attr_value(tag, "name");
          if (type && *type == "password") scan.has_password_field = true;
          if ((type && *type == "email") ||
              (name && name->find("email") != std::string::npos))
            scan.has_email_field = true;
          if (name && (name->find("user") != std::string::npos ||
                       name->find("login") != std::string::npos))
            scan.has_username_field = true;
        }
      }
    }

    if (texty_type(mime) && !scan.has_email_field) {
      if (std::regex_search(text, email_regex())) scan.has_email_field = true;
    }

    if (is_json) {
      if (nlohmann::json::accept(text)) scan.downloaded_file_types["json"]++;
    } else if (is_xml) {
      if (well_formed_xml(text)) scan.downloaded_file_types["xml"]++;
    }
  }
  return scan;
}

}  // namespace netprof
