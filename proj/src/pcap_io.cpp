#include "netprof/pcap_io.hpp"

#include <cstring>

namespace netprof {

namespace {

constexpr uint32_t kMagicUsec = 0xa1b2c3d4;
constexpr uint32_t kMagicUsecSwap = 0xd4c3b2a1;
constexpr uint32_t kMagicNsec = 0xa1b23c4d;
constexpr uint32_t kMagicNsecSwap = 0x4d3cb2a1;

constexpr uint32_t kLinkEthernet = 1;
constexpr uint32_t kLinkRawIp = 101;

uint32_t bswap32(uint32_t v) {
  return ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) | (v >> 24);
}

uint16_t be16(const uint8_t* p) { return static_cast<uint16_t>(p[0] << 8 | p[1]); }

}  // namespace

PcapReader::PcapReader(const std::string& path) {
  file_ = std::fopen(path.c_str(), "rb");
  if (!file_) throw UnreadableFileError("cannot open capture: " + path);
  uint8_t hdr[24];
  if (std::fread(hdr, 1, sizeof(hdr), file_) != sizeof(hdr)) {
    std::fclose(file_);
    file_ = nullptr;
    throw UnreadableFileError("capture too short for global header: " + path);
  }
  uint32_t magic;
  std::memcpy(&magic, hdr, 4);
  switch (magic) {
    case kMagicUsec: swapped_ = false; nanos_ = false; break;
    case kMagicUsecSwap: swapped_ = true; nanos_ = false; break;
    case kMagicNsec: swapped_ = false; nanos_ = true; break;
    case kMagicNsecSwap: swapped_ = true; nanos_ = true; break;
    default:
      std::fclose(file_);
      file_ = nullptr;
      throw UnreadableFileError("bad pcap magic in " + path);
  }
  uint32_t link;
  std::memcpy(&link, hdr + 20, 4);
  if (swapped_) link = bswap32(link);
  link_type_ = link;
  if (link != kLinkEthernet && link != kLinkRawIp) {
    std::fclose(file_);
    file_ = nullptr;
    throw UnsupportedLinkTypeError("unsupported link type " + std::to_string(link));
  }
}

PcapReader::~PcapReader() {
  if (file_) std::fclose(file_);
}

bool PcapReader::next(Packet& out) {
  while (true) {
    bool emitted = false;
    if (!read_record(out, emitted)) return false;
    if (emitted) return true;
  }
}

// Decodes one record. Returns false at EOF. `emitted` tells whether
// `out` holds a packet; otherwise the record was counted as skipped.
bool PcapReader::read_record(Packet& out, bool& emitted) {
  uint8_t rec[16];
  size_t got = std::fread(rec, 1, sizeof(rec), file_);
  if (got == 0) return false;
  if (got < sizeof(rec)) {
    stats_.truncated++;
    return false;
  }
  uint32_t ts_sec, ts_frac, caplen, origlen;
  std::memcpy(&ts_sec, rec, 4);
  std::memcpy(&ts_frac, rec + 4, 4);
  std::memcpy(&caplen, rec + 8, 4);
  std::memcpy(&origlen, rec + 12, 4);
  if (swapped_) {
    ts_sec = bswap32(ts_sec);
    ts_frac = bswap32(ts_frac);
    caplen = bswap32(caplen);
    origlen = bswap32(origlen);
  }
  if (caplen > (1u << 26)) {
    stats_.truncated++;
    return false;  // implausible length, treat as corrupt tail
  }
  std::vector<uint8_t> frame(caplen);
  if (caplen && std::fread(frame.data(), 1, caplen, file_) != caplen) {
    stats_.truncated++;
    return false;
  }
  stats_.records++;

  size_t ip_off = 0;
  if (link_type_ == kLinkEthernet) {
    if (frame.size() < 14) {
      stats_.skipped_non_ip++;
      emitted = false;
      return true;
    }
    uint16_t ethertype = be16(frame.data() + 12);
    if (ethertype != 0x0800 && ethertype != 0x86dd) {
      stats_.skipped_non_ip++;
      emitted = false;
      return true;
    }
    ip_off = 14;
  }

  const uint8_t* ip = frame.data() + ip_off;
  size_t ip_len = frame.size() - ip_off;
  if (ip_len < 1) {
    stats_.skipped_non_ip++;
    emitted = false;
    return true;
  }

  out = Packet{};
  out.timestamp = static_cast<int64_t>(ts_sec) * 1000000 +
                  (nanos_ ? static_cast<int64_t>(ts_frac) / 1000 : static_cast<int64_t>(ts_frac));

  uint8_t version = ip[0] >> 4;
  uint8_t proto = 0;
  size_t l4_off = 0;
  size_t l4_end = 0;
  if (version == 4) {
    if (ip_len < 20) {
      stats_.skipped_non_ip++;
      emitted = false;
      return true;
    }
    size_t ihl = static_cast<size_t>(ip[0] & 0x0f) * 4;
    uint16_t total = be16(ip + 2);
    if (ihl < 20 || ip_len < ihl) {
      stats_.skipped_non_ip++;
      emitted = false;
      return true;
    }
    uint16_t frag = be16(ip + 6);
    proto = ip[9];
    out.src_ip = IpAddr::v4(static_cast<uint32_t>(ip[12]) << 24 | ip[13] << 16 | ip[14] << 8 | ip[15]);
    out.dst_ip = IpAddr::v4(static_cast<uint32_t>(ip[16]) << 24 | ip[17] << 16 | ip[18] << 8 | ip[19]);
    l4_off = ihl;
    l4_end = std::min<size_t>(ip_len, total);
    if ((frag & 0x1fff) != 0) proto = 0;  // non-first fragment, no transport header
  } else if (version == 6) {
    if (ip_len < 40) {
      stats_.skipped_non_ip++;
      emitted = false;
      return true;
    }
    proto = ip[6];
    out.src_ip.v6 = true;
    out.dst_ip.v6 = true;
    std::memcpy(out.src_ip.bytes.data(), ip + 8, 16);
    std::memcpy(out.dst_ip.bytes.data(), ip + 24, 16);
    l4_off = 40;
    l4_end = std::min<size_t>(ip_len, 40u + be16(ip + 4));
    // extension header chains are out of scope; they fall through as OTHER
  } else {
    stats_.skipped_non_ip++;
    emitted = false;
    return true;
  }

  if (l4_end < l4_off) l4_end = l4_off;
  const uint8_t* l4 = ip + l4_off;
  size_t l4_len = l4_end - l4_off;

  if (proto == 6 && l4_len >= 20) {
    out.transport = Transport::TCP;
    out.src_port = be16(l4);
    out.dst_port = be16(l4 + 2);
    size_t doff = static_cast<size_t>(l4[12] >> 4) * 4;
    uint8_t f = l4[13];
    out.tcp_flags = (f & 0x01 ? tcpflag::FIN : 0) | (f & 0x02 ? tcpflag::SYN : 0) |
                    (f & 0x04 ? tcpflag::RST : 0) | (f & 0x08 ? tcpflag::PSH : 0) |
                    (f & 0x10 ? tcpflag::ACK : 0);
    if (doff >= 20 && l4_len >= doff)
      out.payload.assign(l4 + doff, l4 + l4_len);
  } else if (proto == 17 && l4_len >= 8) {
    out.transport = Transport::UDP;
    out.src_port = be16(l4);
    out.dst_port = be16(l4 + 2);
    size_t udp_len = be16(l4 + 4);
    size_t data_end = std::min(l4_len, udp_len);
    if (data_end > 8) out.payload.assign(l4 + 8, l4 + data_end);
  } else {
    out.transport = Transport::OTHER;
  }

  stats_.emitted++;
  emitted = true;
  return true;
}

std::vector<Packet> read_capture(const std::string& path, CaptureStats* stats) {
  PcapReader reader(path);
  std::vector<Packet> out;
  Packet p;
  while (reader.next(p)) out.push_back(std::move(p));
  if (stats) *stats = reader.stats();
  return out;
}

// ---------------------------------------------------------------------------
// writer

namespace {

void put16le(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(static_cast<uint8_t>(x));
  v.push_back(static_cast<uint8_t>(x >> 8));
}
void put32le(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(static_cast<uint8_t>(x));
  v.push_back(static_cast<uint8_t>(x >> 8));
  v.push_back(static_cast<uint8_t>(x >> 16));
  v.push_back(static_cast<uint8_t>(x >> 24));
}
void put16be(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(static_cast<uint8_t>(x >> 8));
  v.push_back(static_cast<uint8_t>(x));
}

std::vector<uint8_t> build_ipv4(const IpAddr& src, const IpAddr& dst, uint8_t proto,
                                const std::vector<uint8_t>& l4) {
  std::vector<uint8_t> ip;
  ip.reserve(20 + l4.size());
  ip.push_back(0x45);
  ip.push_back(0);
  put16be(ip, static_cast<uint16_t>(20 + l4.size()));
  put16be(ip, 0);      // id
  put16be(ip, 0x4000); // DF
  ip.push_back(64);    // ttl
  ip.push_back(proto);
  put16be(ip, 0);      // checksum unset; the reader does not verify
  ip.insert(ip.end(), src.bytes.begin(), src.bytes.begin() + 4);
  ip.insert(ip.end(), dst.bytes.begin(), dst.bytes.begin() + 4);
  ip.insert(ip.end(), l4.begin(), l4.end());
  return ip;
}

}  // namespace

PcapWriter::PcapWriter(const std::string& path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw std::runtime_error("cannot create capture: " + path);
  std::vector<uint8_t> hdr;
  put32le(hdr, kMagicUsec);
  put16le(hdr, 2);
  put16le(hdr, 4);
  put32le(hdr, 0);
  put32le(hdr, 0);
  put32le(hdr, 1 << 16);
  put32le(hdr, kLinkRawIp);
  std::fwrite(hdr.data(), 1, hdr.size(), file_);
}

PcapWriter::~PcapWriter() { close(); }

void PcapWriter::close() {
  if (file_) {
    std::fclose(file_);
    file_ = nullptr;
  }
}

void PcapWriter::write_frame(int64_t ts_us, const std::vector<uint8_t>& frame) {
  std::vector<uint8_t> rec;
  put32le(rec, static_cast<uint32_t>(ts_us / 1000000));
  put32le(rec, static_cast<uint32_t>(ts_us % 1000000));
  put32le(rec, static_cast<uint32_t>(frame.size()));
  put32le(rec, static_cast<uint32_t>(frame.size()));
  rec.insert(rec.end(), frame.begin(), frame.end());
  std::fwrite(rec.data(), 1, rec.size(), file_);
}

void PcapWriter::write_tcp(int64_t ts_us, const IpAddr& src, uint16_t sport, const IpAddr& dst,
                           uint16_t dport, uint8_t flags, const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> tcp;
  tcp.reserve(20 + payload.size());
  put16be(tcp, sport);
  put16be(tcp, dport);
  put32le(tcp, 0);  // seq (value irrelevant downstream)
  put32le(tcp, 0);  // ack
  tcp.push_back(0x50);
  uint8_t f = (flags & tcpflag::FIN ? 0x01 : 0) | (flags & tcpflag::SYN ? 0x02 : 0) |
              (flags & tcpflag::RST ? 0x04 : 0) | (flags & tcpflag::PSH ? 0x08 : 0) |
              (flags & tcpflag::ACK ? 0x10 : 0);
  tcp.push_back(f);
  put16be(tcp, 65535);
  put16be(tcp, 0);
  put16be(tcp, 0);
  tcp.insert(tcp.end(), payload.begin(), payload.end());
  write_frame(ts_us, build_ipv4(src, dst, 6, tcp));
}

void PcapWriter::write_udp(int64_t ts_us, const IpAddr& src, uint16_t sport, const IpAddr& dst,
                           uint16_t dport, const std::vector<uint8_t>& payload) {
  std::vector<uint8_t> udp;
  udp.reserve(8 + payload.size());
  put16be(udp, sport);
  put16be(udp, dport);
  put16be(udp, static_cast<uint16_t>(8 + payload.size()));
  put16be(udp, 0);
  udp.insert(udp.end(), payload.begin(), payload.end());
  write_frame(ts_us, build_ipv4(src, dst, 17, udp));
}

}  // namespace netprof
