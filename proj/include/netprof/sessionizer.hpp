#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "netprof/packet.hpp"

namespace netprof {

enum class CloseReason : uint8_t { FIN, RST, TIMEOUT, END_OF_CAPTURE, UDP_PAIRED, UDP_TIMEOUT };

const char* close_reason_name(CloseReason r);

struct FiveTuple {
  IpAddr client_ip;
  uint16_t client_port = 0;
  IpAddr server_ip;
  uint16_t server_port = 0;
  Transport transport = Transport::TCP;
};

// A TCP exchange from client SYN to first FIN/RST (or timeout), or one
// UDP client datagram plus its replies. Client role is inferred from
// the SYN / first datagram, never from input labels.
struct Session {
  std::string session_id;
  std::string subject_id;
  FiveTuple tuple;
  int64_t start_time = 0;
  int64_t end_time = 0;
  std::vector<Packet> client_packets;
  std::vector<Packet> server_packets;
  CloseReason close_reason = CloseReason::END_OF_CAPTURE;
  bool midstream = false;  // opened without an observed SYN

  size_t packet_count() const { return client_packets.size() + server_packets.size(); }
  std::vector<uint8_t> client_bytes() const;
  std::vector<uint8_t> server_bytes() const;
};

// One instance per subject stream; strictly sequential. Feed packets in
// time order, then flush once.
class Sessionizer {
 public:
  static constexpr int64_t kTcpIdleTimeoutUs = 300ll * 1000000;
  static constexpr int64_t kUdpIdleTimeoutUs = 60ll * 1000000;

  explicit Sessionizer(std::string subject_id) : subject_(std::move(subject_id)) {}

  void feed(const Packet& p);
  // closes everything still open; returns all sessions in open order
  std::vector<Session> flush();

  uint64_t orphan_count() const { return orphans_; }
  uint64_t ignored_non_flow() const { return ignored_; }

 private:
  struct OpenSession {
    Session s;
    int64_t last_ts = 0;
    uint64_t seq = 0;
  };
  struct TupleState {
    long open = -1;           // index into open_
    bool closed_by_fin = false;  // post-FIN/RST packets orphan until a new SYN
  };

  std::string key_of(const Packet& p) const;
  long open_session(const Packet& p, bool midstream);
  void close_session(long idx, CloseReason reason);
  void add_packet(OpenSession& os, const Packet& p);

  std::string subject_;
  std::vector<OpenSession> open_;
  std::vector<Session> closed_;
  std::unordered_map<std::string, TupleState> tuples_;
  uint64_t next_seq_ = 0;
  uint64_t orphans_ = 0;
  uint64_t ignored_ = 0;
};

std::vector<Session> sessionize(const std::string& subject_id, const std::vector<Packet>& packets,
                                uint64_t* orphan_count = nullptr);

// External session log line: tab separated id, subject, 5-tuple,
// times, packet counts, close reason.
std::string session_log_line(const Session& s);

}  // namespace netprof
