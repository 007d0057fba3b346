#include "netprof/packet.hpp"

#include <arpa/inet.h>

#include <cstring>
#include <stdexcept>

namespace netprof {

IpAddr IpAddr::v4(uint32_t host_order) {
  IpAddr a;
  a.v6 = false;
  a.bytes[0] = static_cast<uint8_t>(host_order >> 24);
  a.bytes[1] = static_cast<uint8_t>(host_order >> 16);
  a.bytes[2] = static_cast<uint8_t>(host_order >> 8);
  a.bytes[3] = static_cast<uint8_t>(host_order);
  return a;
}

IpAddr IpAddr::parse(const std::string& text) {
  IpAddr a;
  in_addr a4{};
  if (inet_pton(AF_INET, text.c_str(), &a4) == 1) {
    a.v6 = false;
    std::memcpy(a.bytes.data(), &a4, 4);
    return a;
  }
  in6_addr a6{};
  if (inet_pton(AF_INET6, text.c_str(), &a6) == 1) {
    a.v6 = true;
    std::memcpy(a.bytes.data(), &a6, 16);
    return a;
  }
  throw std::invalid_argument("bad IP address: " + text);
}

std::string IpAddr::to_string() const {
  char buf[INET6_ADDRSTRLEN] = {};
  if (v6) {
    inet_ntop(AF_INET6, bytes.data(), buf, sizeof(buf));
  } else {
    inet_ntop(AF_INET, bytes.data(), buf, sizeof(buf));
  }
  return buf;
}

const char* transport_name(Transport t) {
  switch (t) {
    case Transport::TCP: return "TCP";
    case Transport::UDP: return "UDP";
    default: return "OTHER";
  }
}

}  // namespace netprof
