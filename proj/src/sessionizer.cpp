#include "netprof/sessionizer.hpp"

#include <algorithm>
#include <cstdio>

namespace netprof {

const char* close_reason_name(CloseReason r) {
  switch (r) {
    case CloseReason::FIN: return "FIN";
    case CloseReason::RST: return "RST";
    case CloseReason::TIMEOUT: return "TIMEOUT";
    case CloseReason::END_OF_CAPTURE: return "END_OF_CAPTURE";
    case CloseReason::UDP_PAIRED: return "UDP_PAIRED";
    case CloseReason::UDP_TIMEOUT: return "UDP_TIMEOUT";
  }
  return "?";
}

std::vector<uint8_t> Session::client_bytes() const {
  std::vector<uint8_t> out;
  for (const auto& p : client_packets) out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

std::vector<uint8_t> Session::server_bytes() const {
  std::vector<uint8_t> out;
  for (const auto& p : server_packets) out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

// Direction-independent tuple key.
std::string Sessionizer::key_of(const Packet& p) const {
  std::string a = p.src_ip.to_string() + ":" + std::to_string(p.src_port);
  std::string b = p.dst_ip.to_string() + ":" + std::to_string(p.dst_port);
  if (b < a) std::swap(a, b);
  return std::string(transport_name(p.transport)) + "|" + a + "|" + b;
}

long Sessionizer::open_session(const Packet& p, bool midstream) {
  OpenSession os;
  os.seq = next_seq_++;
  char idbuf[32];
  std::snprintf(idbuf, sizeof(idbuf), "-%06llu", static_cast<unsigned long long>(os.seq));
  os.s.session_id = subject_ + idbuf;
  os.s.subject_id = subject_;
  os.s.tuple.client_ip = p.src_ip;
  os.s.tuple.client_port = p.src_port;
  os.s.tuple.server_ip = p.dst_ip;
  os.s.tuple.server_port = p.dst_port;
  os.s.tuple.transport = p.transport;
  os.s.start_time = p.timestamp;
  os.s.end_time = p.timestamp;
  os.s.midstream = midstream;
  os.last_ts = p.timestamp;
  open_.push_back(std::move(os));
  return static_cast<long>(open_.size() - 1);
}

void Sessionizer::close_session(long idx, CloseReason reason) {
  OpenSession& os = open_[idx];
  if (os.s.tuple.transport == Transport::UDP) {
    os.s.close_reason =
        os.s.server_packets.empty() ? CloseReason::UDP_TIMEOUT : CloseReason::UDP_PAIRED;
  } else {
    os.s.close_reason = reason;
  }
  closed_.push_back(std::move(os.s));
}

void Sessionizer::add_packet(OpenSession& os, const Packet& p) {
  bool from_client = p.src_ip == os.s.tuple.client_ip && p.src_port == os.s.tuple.client_port;
  if (from_client)
    os.s.client_packets.push_back(p);
  else
    os.s.server_packets.push_back(p);
  os.s.end_time = p.timestamp;
  os.last_ts = p.timestamp;
}

void Sessionizer::feed(const Packet& p) {
  if (p.transport == Transport::OTHER) {
    ignored_++;
    return;
  }
  const bool tcp = p.transport == Transport::TCP;
  const int64_t timeout = tcp ? kTcpIdleTimeoutUs : kUdpIdleTimeoutUs;
  std::string key = key_of(p);
  TupleState& st = tuples_[key];

  if (st.open >= 0) {
    OpenSession& os = open_[st.open];
    if (p.timestamp - os.last_ts > timeout) {
      close_session(st.open, CloseReason::TIMEOUT);
      st.open = -1;
      st.closed_by_fin = false;  // idle split; the flow may resume mid-stream
    }
  }

  if (st.open >= 0) {
    long idx = st.open;
    OpenSession& os = open_[idx];
    if (!tcp) {
      bool from_client = p.src_ip == os.s.tuple.client_ip && p.src_port == os.s.tuple.client_port;
      if (from_client) {
        // a UDP session is a single client datagram plus its replies;
        // the next request starts a fresh session
        close_session(idx, CloseReason::UDP_TIMEOUT);
        st.open = open_session(p, false);
        add_packet(open_[st.open], p);
      } else {
        add_packet(os, p);
      }
      return;
    }
    add_packet(os, p);
    if (p.tcp_flags & tcpflag::FIN) {
      close_session(idx, CloseReason::FIN);
      st.open = -1;
      st.closed_by_fin = true;
    } else if (p.tcp_flags & tcpflag::RST) {
      close_session(idx, CloseReason::RST);
      st.open = -1;
      st.closed_by_fin = true;
    }
    return;
  }

  // no open session on this tuple
  if (tcp) {
    bool pure_syn = (p.tcp_flags & tcpflag::SYN) && !(p.tcp_flags & tcpflag::ACK);
    if (pure_syn) {
      st.closed_by_fin = false;
      st.open = open_session(p, false);
      add_packet(open_[st.open], p);
      // a SYN carrying FIN/RST is malformed; leave the session to close by timeout
    } else if (st.closed_by_fin) {
      orphans_++;  // tail packets of a finished connection
    } else {
      st.open = open_session(p, true);
      add_packet(open_[st.open], p);
      if (p.tcp_flags & tcpflag::FIN) {
        close_session(st.open, CloseReason::FIN);
        st.open = -1;
        st.closed_by_fin = true;
      } else if (p.tcp_flags & tcpflag::RST) {
        close_session(st.open, CloseReason::RST);
        st.open = -1;
        st.closed_by_fin = true;
      }
    }
  } else {
    st.open = open_session(p, false);
    add_packet(open_[st.open], p);
  }
}

std::vector<Session> Sessionizer::flush() {
  for (auto& [key, st] : tuples_) {
    if (st.open >= 0) {
      close_session(st.open, CloseReason::END_OF_CAPTURE);
      st.open = -1;
    }
  }
  open_.clear();
  std::sort(closed_.begin(), closed_.end(),
            [](const Session& a, const Session& b) { return a.session_id < b.session_id; });
  return std::move(closed_);
}

std::vector<Session> sessionize(const std::string& subject_id, const std::vector<Packet>& packets,
                                uint64_t* orphan_count) {
  Sessionizer sz(subject_id);
  for (const auto& p : packets) sz.feed(p);
  auto out = sz.flush();
  if (orphan_count) *orphan_count = sz.orphan_count();
  return out;
}

std::string session_log_line(const Session& s) {
  std::string out;
  out += s.session_id;
  out += '\t';
  out += s.subject_id;
  out += '\t';
  out += s.tuple.client_ip.to_string() + ":" + std::to_string(s.tuple.client_port);
  out += '\t';
  out += s.tuple.server_ip.to_string() + ":" + std::to_string(s.tuple.server_port);
  out += '\t';
  out += transport_name(s.tuple.transport);
  out += '\t';
  out += std::to_string(s.start_time);
  out += '\t';
  out += std::to_string(s.end_time);
  out += '\t';
  out += std::to_string(s.client_packets.size());
  out += '\t';
  out += std::to_string(s.server_packets.size());
  out += '\t';
  out += close_reason_name(s.close_reason);
  return out;
}

}  // namespace netprof
