#include "netprof/tls_parser.hpp"

#include "netprof/der.hpp"

namespace netprof {

namespace {

constexpr uint8_t kChangeCipherSpec = 0x14;
constexpr uint8_t kAlert = 0x15;
constexpr uint8_t kHandshake = 0x16;
constexpr uint8_t kApplicationData = 0x17;

constexpr uint8_t kHsClientHello = 1;
constexpr uint8_t kHsServerHello = 2;
constexpr uint8_t kHsCertificate = 11;

uint16_t be16(const uint8_t* p) { return static_cast<uint16_t>(p[0] << 8 | p[1]); }
uint32_t be24(const uint8_t* p) { return static_cast<uint32_t>(p[0] << 16 | p[1] << 8 | p[2]); }

bool plausible_version(uint16_t v) { return (v >> 8) == 0x03 && (v & 0xff) <= 0x04; }

TlsVersion version_from_wire(uint16_t v) {
  switch (v) {
    case 0x0300: return TlsVersion::SSL3;
    case 0x0301: return TlsVersion::TLS1_0;
    case 0x0302: return TlsVersion::TLS1_1;
    case 0x0303: return TlsVersion::TLS1_2;
    default: return TlsVersion::UNKNOWN;
  }
}

// Concatenates handshake record payloads until the first
// ChangeCipherSpec (everything after it is encrypted).
std::vector<uint8_t> handshake_bytes(const std::vector<uint8_t>& stream) {
  std::vector<uint8_t> out;
  size_t pos = 0;
  while (pos + 5 <= stream.size()) {
    uint8_t type = stream[pos];
    uint16_t ver = be16(&stream[pos + 1]);
    uint16_t len = be16(&stream[pos + 3]);
    if (!plausible_version(ver) || len > 18432) break;
    if (type == kChangeCipherSpec) break;
    if (type != kHandshake && type != kAlert && type != kApplicationData) break;
    size_t avail = std::min<size_t>(len, stream.size() - pos - 5);
    if (type == kHandshake)
      out.insert(out.end(), stream.begin() + pos + 5, stream.begin() + pos + 5 + avail);
    if (avail < len) break;  // truncated record
    pos += 5ull + len;
  }
  return out;
}

struct HandshakeMsg {
  uint8_t type;
  const uint8_t* body;
  size_t len;
};

template <typename Fn>
void each_handshake(const std::vector<uint8_t>& hs, Fn&& fn) {
  size_t pos = 0;
  while (pos + 4 <= hs.size()) {
    uint8_t type = hs[pos];
    uint32_t len = be24(&hs[pos + 1]);
    if (pos + 4 + len > hs.size()) break;  // truncated message
    fn(HandshakeMsg{type, hs.data() + pos + 4, len});
    pos += 4ull + len;
  }
}

std::optional<std::string> sni_from_client_hello(const HandshakeMsg& m) {
  // version(2) random(32) sid cs comp [extensions]
  size_t p = 2 + 32;
  if (p + 1 > m.len) return std::nullopt;
  p += 1ull + m.body[p];                      // session id
  if (p + 2 > m.len) return std::nullopt;
  p += 2ull + be16(m.body + p);               // cipher suites
  if (p + 1 > m.len) return std::nullopt;
  p += 1ull + m.body[p];                      // compression methods
  if (p + 2 > m.len) return std::nullopt;
  size_t ext_end = p + 2 + be16(m.body + p);
  p += 2;
  if (ext_end > m.len) return std::nullopt;
  while (p + 4 <= ext_end) {
    uint16_t ext_type = be16(m.body + p);
    uint16_t ext_len = be16(m.body + p + 2);
    p += 4;
    if (p + ext_len > ext_end) return std::nullopt;
    if (ext_type == 0) {  // server_name
      size_t q = p;
      if (q + 2 > p + ext_len) return std::nullopt;
      size_t list_end = q + 2 + be16(m.body + q);
      q += 2;
      while (q + 3 <= list_end && list_end <= p + ext_len) {
        uint8_t name_type = m.body[q];
        uint16_t name_len = be16(m.body + q + 1);
        q += 3;
        if (q + name_len > list_end) break;
        if (name_type == 0)
          return std::string(reinterpret_cast<const char*>(m.body + q), name_len);
        q += name_len;
      }
      return std::nullopt;
    }
    p += ext_len;
  }
  return std::nullopt;
}

std::optional<std::vector<uint8_t>> leaf_certificate(const HandshakeMsg& m) {
  if (m.len < 3) return std::nullopt;
  uint32_t total = be24(m.body);
  if (3ull + total > m.len) return std::nullopt;
  if (total < 3) return std::nullopt;
  uint32_t leaf_len = be24(m.body + 3);
  if (6ull + leaf_len > m.len) return std::nullopt;
  return std::vector<uint8_t>(m.body + 6, m.body + 6 + leaf_len);
}

}  // namespace

const char* tls_version_name(TlsVersion v) {
  switch (v) {
    case TlsVersion::SSL3: return "SSL3";
    case TlsVersion::TLS1_0: return "TLS1_0";
    case TlsVersion::TLS1_1: return "TLS1_1";
    case TlsVersion::TLS1_2: return "TLS1_2";
    default: return "UNKNOWN";
  }
}

bool looks_like_tls(const std::vector<uint8_t>& client_bytes) {
  return client_bytes.size() >= 5 && client_bytes[0] == kHandshake &&
         plausible_version(be16(&client_bytes[1]));
}

TlsSummary parse_tls(const std::vector<uint8_t>& client_bytes,
                     const std::vector<uint8_t>& server_bytes, int64_t observed_at_us) {
  const std::vector<uint8_t>& first = client_bytes.empty() ? server_bytes : client_bytes;
  if (first.size() < 5 || first[0] != kHandshake || !plausible_version(be16(&first[1])))
    throw NotTlsError("first record is not TLS handshake");

  TlsSummary out;
  std::optional<uint16_t> client_version;
  std::optional<uint16_t> server_version;

  auto client_hs = handshake_bytes(client_bytes);
  each_handshake(client_hs, [&](const HandshakeMsg& m) {
    if (m.type == kHsClientHello && m.len >= 2) {
      if (!client_version) client_version = be16(m.body);
      if (!out.sni) out.sni = sni_from_client_hello(m);
    }
  });

  auto server_hs = handshake_bytes(server_bytes);
  std::optional<std::vector<uint8_t>> leaf;
  each_handshake(server_hs, [&](const HandshakeMsg& m) {
    if (m.type == kHsServerHello && m.len >= 2) {
      if (!server_version) server_version = be16(m.body);
    } else if (m.type == kHsCertificate && !leaf) {
      leaf = leaf_certificate(m);
    }
  });

  if (server_version)
    out.version = version_from_wire(*server_version);
  else if (client_version)
    out.version = version_from_wire(*client_version);

  if (leaf) {
    if (auto cert = parse_certificate(*leaf)) {
      out.cert_self_signed =
          cert->issuer_der == cert->subject_der ? TriState::TRUE_ : TriState::FALSE_;
      if (cert->times_valid)
        out.cert_expired = cert->not_after_us < observed_at_us ? TriState::TRUE_ : TriState::FALSE_;
    }
  }
  return out;
}

}  // namespace netprof
