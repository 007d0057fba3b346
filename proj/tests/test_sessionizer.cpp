#include "doctest.h"

#include <set>

#include "netprof/rng.hpp"
#include "netprof/sessionizer.hpp"

using namespace netprof;

namespace {

Packet tcp_pkt(int64_t ts, const char* src, uint16_t sport, const char* dst, uint16_t dport,
               uint8_t flags, size_t payload = 0) {
  Packet p;
  p.timestamp = ts;
  p.src_ip = IpAddr::parse(src);
  p.dst_ip = IpAddr::parse(dst);
  p.src_port = sport;
  p.dst_port = dport;
  p.transport = Transport::TCP;
  p.tcp_flags = flags;
  p.payload.assign(payload, 0xab);
  return p;
}

Packet udp_pkt(int64_t ts, const char* src, uint16_t sport, const char* dst, uint16_t dport,
               size_t payload) {
  Packet p;
  p.timestamp = ts;
  p.src_ip = IpAddr::parse(src);
  p.dst_ip = IpAddr::parse(dst);
  p.src_port = sport;
  p.dst_port = dport;
  p.transport = Transport::UDP;
  p.payload.assign(payload, 0xcd);
  return p;
}

constexpr const char* C = "10.0.0.5";
constexpr const char* S = "93.184.1.1";

}  // namespace

TEST_CASE("SYN to FIN makes one session") {
  std::vector<Packet> pkts = {
      tcp_pkt(1000, C, 40000, S, 80, tcpflag::SYN),
      tcp_pkt(2000, S, 80, C, 40000, tcpflag::SYN | tcpflag::ACK),
      tcp_pkt(3000, C, 40000, S, 80, tcpflag::ACK),
      tcp_pkt(4000, C, 40000, S, 80, tcpflag::ACK | tcpflag::PSH, 100),
      tcp_pkt(5000, C, 40000, S, 80, tcpflag::FIN | tcpflag::ACK),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 1);
  const Session& s = sessions[0];
  CHECK(s.close_reason == CloseReason::FIN);
  CHECK(s.tuple.client_ip.to_string() == C);
  CHECK(s.tuple.server_port == 80);
  CHECK(s.client_packets.size() == 4);
  CHECK(s.server_packets.size() == 1);
  CHECK(s.start_time == 1000);
  CHECK(s.end_time == 5000);
  CHECK(!s.midstream);
}

TEST_CASE("two interleaved tuples stay separate") {
  std::vector<Packet> pkts = {
      tcp_pkt(1000, C, 40000, S, 80, tcpflag::SYN),
      tcp_pkt(1100, C, 40001, S, 443, tcpflag::SYN),
      tcp_pkt(1200, S, 80, C, 40000, tcpflag::SYN | tcpflag::ACK),
      tcp_pkt(1300, S, 443, C, 40001, tcpflag::SYN | tcpflag::ACK),
      tcp_pkt(1400, C, 40000, S, 80, tcpflag::FIN | tcpflag::ACK),
      tcp_pkt(1500, C, 40001, S, 443, tcpflag::FIN | tcpflag::ACK),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 2);
  std::set<uint16_t> ports{sessions[0].tuple.server_port, sessions[1].tuple.server_port};
  CHECK(ports == std::set<uint16_t>{80, 443});
}

TEST_CASE("UDP query with reply pairs up") {
  std::vector<Packet> pkts = {
      udp_pkt(1000, C, 50000, S, 53, 30),
      udp_pkt(20000, S, 53, C, 50000, 120),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].close_reason == CloseReason::UDP_PAIRED);
  CHECK(sessions[0].client_packets.size() == 1);
  CHECK(sessions[0].server_packets.size() == 1);
}

TEST_CASE("flush closes open sessions") {
  Sessionizer sz("s01");
  SUBCASE("open TCP -> END_OF_CAPTURE") {
    sz.feed(tcp_pkt(1000, C, 40000, S, 80, tcpflag::SYN));
    sz.feed(tcp_pkt(4000, C, 40000, S, 80, tcpflag::ACK, 10));
    auto sessions = sz.flush();
    REQUIRE(sessions.size() == 1);
    CHECK(sessions[0].close_reason == CloseReason::END_OF_CAPTURE);
    CHECK(sessions[0].end_time == 4000);
  }
  SUBCASE("nothing open -> empty") { CHECK(sz.flush().empty()); }
  SUBCASE("unanswered UDP query -> UDP_TIMEOUT with no server packets") {
    sz.feed(udp_pkt(1000, C, 50000, S, 53, 30));
    auto sessions = sz.flush();
    REQUIRE(sessions.size() == 1);
    CHECK(sessions[0].close_reason == CloseReason::UDP_TIMEOUT);
    CHECK(sessions[0].server_packets.empty());
  }
}

TEST_CASE("idle timeout splits tcp flows") {
  std::vector<Packet> pkts = {
      tcp_pkt(0, C, 40000, S, 80, tcpflag::SYN),
      tcp_pkt(1000, C, 40000, S, 80, tcpflag::ACK, 10),
      // 301 seconds later on the same tuple
      tcp_pkt(302ll * 1000000, C, 40000, S, 80, tcpflag::ACK, 10),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[0].close_reason == CloseReason::TIMEOUT);
  CHECK(sessions[0].end_time == 1000);
  CHECK(sessions[1].midstream);  // continuation without a SYN
}

TEST_CASE("RST closes the session") {
  std::vector<Packet> pkts = {
      tcp_pkt(1000, C, 40000, S, 80, tcpflag::SYN),
      tcp_pkt(2000, S, 80, C, 40000, tcpflag::RST),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].close_reason == CloseReason::RST);
}

TEST_CASE("post-FIN stragglers are orphans until a new SYN") {
  std::vector<Packet> pkts = {
      tcp_pkt(1000, C, 40000, S, 80, tcpflag::SYN),
      tcp_pkt(2000, C, 40000, S, 80, tcpflag::FIN | tcpflag::ACK),
      tcp_pkt(3000, S, 80, C, 40000, tcpflag::ACK),   // orphan
      tcp_pkt(4000, S, 80, C, 40000, tcpflag::FIN | tcpflag::ACK),  // orphan
      tcp_pkt(5000, C, 40000, S, 80, tcpflag::SYN),   // new session
      tcp_pkt(6000, C, 40000, S, 80, tcpflag::FIN | tcpflag::ACK),
  };
  uint64_t orphans = 0;
  auto sessions = sessionize("s01", pkts, &orphans);
  CHECK(sessions.size() == 2);
  CHECK(orphans == 2);
  size_t in_sessions = 0;
  for (const auto& s : sessions) in_sessions += s.packet_count();
  CHECK(in_sessions + orphans == pkts.size());
}

TEST_CASE("mid-stream traffic keeps a flagged session with first sender as client") {
  std::vector<Packet> pkts = {
      tcp_pkt(1000, S, 80, C, 40000, tcpflag::ACK | tcpflag::PSH, 500),
      tcp_pkt(2000, C, 40000, S, 80, tcpflag::ACK, 10),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].midstream);
  // roles come from the first observed packet, not from any labeling
  CHECK(sessions[0].tuple.client_ip.to_string() == S);
  CHECK(sessions[0].client_packets.size() == 1);
  CHECK(sessions[0].server_packets.size() == 1);
}

TEST_CASE("second UDP request opens a new session") {
  std::vector<Packet> pkts = {
      udp_pkt(1000, C, 50000, S, 53, 30),
      udp_pkt(2000, S, 53, C, 50000, 100),
      udp_pkt(3000, C, 50000, S, 53, 31),  // new request, same tuple
      udp_pkt(4000, S, 53, C, 50000, 101),
  };
  auto sessions = sessionize("s01", pkts);
  REQUIRE(sessions.size() == 2);
  CHECK(sessions[0].close_reason == CloseReason::UDP_PAIRED);
  CHECK(sessions[1].close_reason == CloseReason::UDP_PAIRED);
}

TEST_CASE("determinism: identical input gives identical session logs") {
  std::vector<Packet> pkts;
  Rng rng(99);
  int64_t ts = 0;
  for (int i = 0; i < 200; ++i) {
    ts += rng.uniform(2000000);
    uint16_t cport = static_cast<uint16_t>(40000 + rng.uniform(4));
    bool tcp = rng.bernoulli(0.7);
    if (tcp) {
      uint8_t flags = rng.bernoulli(0.2) ? tcpflag::SYN
                      : rng.bernoulli(0.1) ? (tcpflag::FIN | tcpflag::ACK)
                                           : (tcpflag::ACK | tcpflag::PSH);
      if (rng.bernoulli(0.5))
        pkts.push_back(tcp_pkt(ts, C, cport, S, 80, flags, rng.uniform(100)));
      else
        pkts.push_back(tcp_pkt(ts, S, 80, C, cport, flags, rng.uniform(100)));
    } else {
      if (rng.bernoulli(0.5))
        pkts.push_back(udp_pkt(ts, C, cport, S, 53, 20 + rng.uniform(40)));
      else
        pkts.push_back(udp_pkt(ts, S, 53, C, cport, 20 + rng.uniform(40)));
    }
  }
  auto a = sessionize("s01", pkts);
  auto b = sessionize("s01", pkts);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(session_log_line(a[i]) == session_log_line(b[i]));
}

TEST_CASE("partition property on random streams") {
  Rng rng(1234);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<Packet> pkts;
    int64_t ts = 0;
    int n = 5 + static_cast<int>(rng.uniform(60));
    size_t flow_pkts = 0;
    for (int i = 0; i < n; ++i) {
      ts += rng.uniform(5000000);
      uint16_t cport = static_cast<uint16_t>(40000 + rng.uniform(3));
      uint16_t sport = rng.bernoulli(0.5) ? 80 : 53;
      bool tcp = rng.bernoulli(0.6);
      bool from_client = rng.bernoulli(0.6);
      if (tcp) {
        uint8_t flags = 0;
        double r = rng.uniform_real();
        if (r < 0.25) flags = tcpflag::SYN;
        else if (r < 0.35) flags = tcpflag::FIN | tcpflag::ACK;
        else if (r < 0.40) flags = tcpflag::RST;
        else flags = tcpflag::ACK | tcpflag::PSH;
        if (from_client)
          pkts.push_back(tcp_pkt(ts, C, cport, S, sport, flags, rng.uniform(50)));
        else
          pkts.push_back(tcp_pkt(ts, S, sport, C, cport, flags, rng.uniform(50)));
      } else {
        if (from_client)
          pkts.push_back(udp_pkt(ts, C, cport, S, sport, 1 + rng.uniform(50)));
        else
          pkts.push_back(udp_pkt(ts, S, sport, C, cport, 1 + rng.uniform(50)));
      }
      flow_pkts++;
    }
    uint64_t orphans = 0;
    auto sessions = sessionize("s01", pkts, &orphans);
    size_t in_sessions = 0;
    for (const auto& s : sessions) in_sessions += s.packet_count();
    CHECK(in_sessions + orphans == flow_pkts);
  }
}
