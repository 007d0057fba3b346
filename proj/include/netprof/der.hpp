#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netprof {
namespace der {

// Minimal DER TLV reader; enough for X.509 leaf inspection.
struct Tlv {
  uint8_t tag = 0;
  std::vector<uint8_t> value;     // content bytes
  std::vector<uint8_t> raw;       // full TLV encoding
};

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}
  explicit Reader(const std::vector<uint8_t>& v) : Reader(v.data(), v.size()) {}

  bool eof() const { return pos_ >= size_; }
  // next TLV; false on truncation or bad length
  bool next(Tlv& out);
  // peek at the next tag byte without consuming
  std::optional<uint8_t> peek_tag() const;

 private:
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

constexpr uint8_t kSequence = 0x30;
constexpr uint8_t kSet = 0x31;
constexpr uint8_t kInteger = 0x02;
constexpr uint8_t kOid = 0x06;
constexpr uint8_t kUtf8String = 0x0c;
constexpr uint8_t kPrintableString = 0x13;
constexpr uint8_t kUtcTime = 0x17;
constexpr uint8_t kGeneralizedTime = 0x18;
constexpr uint8_t kContext0 = 0xa0;

// --- writer side, used by the synthetic generator and test fixtures ---

std::vector<uint8_t> encode(uint8_t tag, const std::vector<uint8_t>& content);
std::vector<uint8_t> sequence(const std::vector<std::vector<uint8_t>>& parts);
std::vector<uint8_t> set(const std::vector<std::vector<uint8_t>>& parts);
std::vector<uint8_t> integer(int64_t v);
std::vector<uint8_t> printable_string(const std::string& s);
std::vector<uint8_t> utc_time(const std::string& yymmddhhmmss_z);
std::vector<uint8_t> oid(const std::vector<uint32_t>& arcs);
std::vector<uint8_t> context(uint8_t n, const std::vector<uint8_t>& inner);

}  // namespace der

// The fields we need from a leaf certificate.
struct CertInfo {
  std::vector<uint8_t> issuer_der;
  std::vector<uint8_t> subject_der;
  int64_t not_before_us = 0;
  int64_t not_after_us = 0;
  bool times_valid = false;
};

// Parses enough of an X.509 certificate for expiry and self-signature
// checks; nullopt when the structure does not decode.
std::optional<CertInfo> parse_certificate(const std::vector<uint8_t>& cert_der);

// A minimal unsigned certificate skeleton that parse_certificate
// accepts; issuer/subject are single-CN names.
std::vector<uint8_t> build_test_certificate(const std::string& issuer_cn,
                                            const std::string& subject_cn,
                                            int64_t not_before_us, int64_t not_after_us);

}  // namespace netprof
