#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace netprof {

// First record is not TLS handshake content (0x16).
struct NotTlsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TlsVersion : uint8_t { SSL3, TLS1_0, TLS1_1, TLS1_2, UNKNOWN };

const char* tls_version_name(TlsVersion v);

enum class TriState : uint8_t { FALSE_, TRUE_, UNKNOWN };

struct TlsSummary {
  TlsVersion version = TlsVersion::UNKNOWN;
  std::optional<std::string> sni;
  // unknown until a certificate message is observed
  TriState cert_expired = TriState::UNKNOWN;
  TriState cert_self_signed = TriState::UNKNOWN;
};

// Version comes from the ServerHello when present (ClientHello's
// otherwise); SNI from the server_name extension; certificate checks
// from the leaf of the server Certificate message.
TlsSummary parse_tls(const std::vector<uint8_t>& client_bytes,
                     const std::vector<uint8_t>& server_bytes, int64_t observed_at_us);

// true when the stream opens with a handshake record header
bool looks_like_tls(const std::vector<uint8_t>& client_bytes);

}  // namespace netprof
