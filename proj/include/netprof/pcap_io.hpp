#pragma once

#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "netprof/packet.hpp"

namespace netprof {

struct UnreadableFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedLinkTypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Counts kept alongside the emitted stream so callers can verify
// emitted + skipped == records in file.
struct CaptureStats {
  uint64_t records = 0;        // packet records seen (complete ones)
  uint64_t emitted = 0;        // IP/TCP/UDP/OTHER packets produced
  uint64_t skipped_non_ip = 0; // ARP and friends
  uint64_t truncated = 0;      // trailing partial record, at most 1
};

// Classic pcap reader: magics 0xa1b2c3d4 (usec) and 0xa1b23c4d (nsec),
// both byte orders, link types Ethernet and raw IP. Timestamps are
// normalized to microseconds.
class PcapReader {
 public:
  explicit PcapReader(const std::string& path);
  ~PcapReader();
  PcapReader(const PcapReader&) = delete;
  PcapReader& operator=(const PcapReader&) = delete;

  // false at end of file; skipped frames advance the stream internally
  bool next(Packet& out);

  const CaptureStats& stats() const { return stats_; }
  uint32_t link_type() const { return link_type_; }

 private:
  bool read_record(Packet& out, bool& emitted);

  FILE* file_ = nullptr;
  bool swapped_ = false;
  bool nanos_ = false;
  uint32_t link_type_ = 0;
  CaptureStats stats_;
};

std::vector<Packet> read_capture(const std::string& path, CaptureStats* stats = nullptr);

// Minimal writer for fixtures and the synthetic generator. Emits
// classic usec pcap with raw-IP link type (IPv4 headers built here).
class PcapWriter {
 public:
  explicit PcapWriter(const std::string& path);
  ~PcapWriter();

  void write_tcp(int64_t ts_us, const IpAddr& src, uint16_t sport, const IpAddr& dst,
                 uint16_t dport, uint8_t flags, const std::vector<uint8_t>& payload);
  void write_udp(int64_t ts_us, const IpAddr& src, uint16_t sport, const IpAddr& dst,
                 uint16_t dport, const std::vector<uint8_t>& payload);
  // raw frame escape hatch (tests craft odd records with it)
  void write_frame(int64_t ts_us, const std::vector<uint8_t>& frame);
  void close();

 private:
  FILE* file_ = nullptr;
};

}  // namespace netprof
