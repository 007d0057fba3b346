#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netprof/http_parser.hpp"

namespace netprof {

struct DpiScan {
  int form_count = 0;
  bool has_email_field = false;
  bool has_username_field = false;
  bool has_password_field = false;
  int downloaded_file_count = 0;
  std::map<std::string, int> downloaded_file_types;  // type tag -> occurrences
  int undecodable_bodies = 0;                        // diagnostics only
};

// Payload content scan over a session's transactions: gzip bodies are
// inflated first, HTML forms and credential fields counted, downloads
// tallied, JSON/XML checked for well-formedness.
DpiScan dpi_scan(const std::vector<HttpTransaction>& transactions);

// gzip (or zlib) inflate; nullopt when the data does not decode
std::optional<std::vector<uint8_t>> gunzip(const std::vector<uint8_t>& data);
std::vector<uint8_t> gzip_compress(const std::vector<uint8_t>& data);

}  // namespace netprof
