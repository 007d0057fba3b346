#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace netprof {

// IPv4 or IPv6 address in canonical bytes. v4 occupies bytes [0,4).
struct IpAddr {
  bool v6 = false;
  std::array<uint8_t, 16> bytes{};

  static IpAddr v4(uint32_t host_order);
  // parses dotted-quad or RFC 4291 hex form; throws on bad input
  static IpAddr parse(const std::string& text);
  std::string to_string() const;

  bool operator==(const IpAddr& o) const { return v6 == o.v6 && bytes == o.bytes; }
  bool operator<(const IpAddr& o) const {
    if (v6 != o.v6) return v6 < o.v6;
    return bytes < o.bytes;
  }
};

enum class Transport : uint8_t { TCP, UDP, OTHER };

const char* transport_name(Transport t);

namespace tcpflag {
constexpr uint8_t FIN = 0x01;
constexpr uint8_t SYN = 0x02;
constexpr uint8_t RST = 0x04;
constexpr uint8_t PSH = 0x08;
constexpr uint8_t ACK = 0x10;
}  // namespace tcpflag

struct Packet {
  int64_t timestamp = 0;  // microseconds since epoch
  IpAddr src_ip;
  IpAddr dst_ip;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  Transport transport = Transport::OTHER;
  uint8_t tcp_flags = 0;  // empty unless transport == TCP
  std::vector<uint8_t> payload;

  size_t payload_len() const { return payload.size(); }
};

}  // namespace netprof

template <>
struct std::hash<netprof::IpAddr> {
  size_t operator()(const netprof::IpAddr& a) const noexcept {
    size_t h = a.v6 ? 0x9e3779b9u : 0;
    for (uint8_t b : a.bytes) h = h * 131 + b;
    return h;
  }
};
