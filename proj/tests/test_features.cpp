#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "netprof/rng.hpp"
#include "netprof/session_features.hpp"
#include "netprof/util.hpp"

using namespace netprof;

namespace {

// independent brute-force recomputation used as the oracle
struct NaiveStats {
  double mx = 0, mn = 0, mean = 0, median = 0, var = 0;
};

NaiveStats naive(std::vector<double> sizes) {
  sizes.erase(std::remove_if(sizes.begin(), sizes.end(), [](double s) { return s <= 0; }),
              sizes.end());
  NaiveStats r;
  if (sizes.empty()) return r;
  std::sort(sizes.begin(), sizes.end());
  r.mn = sizes.front();
  r.mx = sizes.back();
  double sum = 0;
  for (double v : sizes) sum += v;
  r.mean = sum / sizes.size();
  r.median = sizes.size() % 2 == 1 ? sizes[sizes.size() / 2]
                                   : 0.5 * (sizes[sizes.size() / 2 - 1] + sizes[sizes.size() / 2]);
  for (double v : sizes) r.var += (v - r.mean) * (v - r.mean);
  r.var /= sizes.size();
  return r;
}

Session make_session(const std::vector<std::vector<uint8_t>>& client_payloads,
                     const std::vector<std::vector<uint8_t>>& server_payloads,
                     uint16_t server_port = 80, Transport transport = Transport::TCP) {
  Session s;
  s.session_id = "t-0";
  s.subject_id = "t";
  s.tuple.client_ip = IpAddr::parse("10.0.0.1");
  s.tuple.client_port = 40000;
  s.tuple.server_ip = IpAddr::parse("93.184.1.1");
  s.tuple.server_port = server_port;
  s.tuple.transport = transport;
  s.start_time = 1404172800ll * 1000000;
  s.end_time = s.start_time + 1000000;
  int64_t ts = s.start_time;
  for (const auto& pl : client_payloads) {
    Packet p;
    p.timestamp = ts++;
    p.src_ip = s.tuple.client_ip;
    p.dst_ip = s.tuple.server_ip;
    p.src_port = 40000;
    p.dst_port = server_port;
    p.transport = transport;
    p.payload = pl;
    s.client_packets.push_back(std::move(p));
  }
  for (const auto& pl : server_payloads) {
    Packet p;
    p.timestamp = ts++;
    p.src_ip = s.tuple.server_ip;
    p.dst_ip = s.tuple.client_ip;
    p.src_port = server_port;
    p.dst_port = 40000;
    p.transport = transport;
    p.payload = pl;
    s.server_packets.push_back(std::move(p));
  }
  return s;
}

std::vector<uint8_t> blob(size_t n) { return std::vector<uint8_t>(n, 0x77); }

}  // namespace

TEST_CASE("statistical features worked example") {
  StatFeatures f = statistical_features({100, 200}, {300});
  CHECK(f.tx_pkt_max == 200);
  CHECK(f.tx_pkt_min == 100);
  CHECK(f.tx_pkt_mean == 150);
  CHECK(f.tx_pkt_median == 150);
  CHECK(f.tx_pkt_var == 2500);
  CHECK(f.bytes_tx == 300);
  CHECK(f.bytes_rx == 300);
  CHECK(f.bytes_total == 600);
  CHECK(f.tx_rx_ratio == 1.0);
}

TEST_CASE("degenerate directions") {
  StatFeatures one = statistical_features({80}, {});
  CHECK(one.tx_pkt_var == 0);
  CHECK(one.rx_pkt_max == 0);
  CHECK(one.rx_pkt_mean == 0);
  CHECK(one.tx_rx_ratio == 80);  // rx == 0 smoothing

  StatFeatures empty = statistical_features({}, {});
  CHECK(empty.bytes_total == 0);
  CHECK(empty.tx_rx_ratio == 0);
}

TEST_CASE("zero payload packets are excluded from size statistics") {
  StatFeatures f = statistical_features({0, 100, 0, 200}, {0});
  CHECK(f.tx_pkt_min == 100);
  CHECK(f.tx_pkt_mean == 150);
  CHECK(f.rx_pkt_max == 0);
  CHECK(f.bytes_tx == 300);
}

TEST_CASE("statistics agree with naive recomputation on random sessions") {
  Rng rng(2024);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<double> tx(rng.uniform(12)), rx(rng.uniform(12));
    for (auto& v : tx) v = static_cast<double>(rng.uniform(1500));
    for (auto& v : rx) v = static_cast<double>(rng.uniform(1500));
    StatFeatures f = statistical_features(tx, rx);
    NaiveStats nt = naive(tx), nr = naive(rx);
    CHECK(f.tx_pkt_max == nt.mx);
    CHECK(f.tx_pkt_min == nt.mn);
    CHECK(f.tx_pkt_median == nt.median);
    CHECK(f.tx_pkt_mean == doctest::Approx(nt.mean).epsilon(1e-9));
    CHECK(f.tx_pkt_var == doctest::Approx(nt.var).epsilon(1e-9));
    CHECK(f.rx_pkt_mean == doctest::Approx(nr.mean).epsilon(1e-9));
    CHECK(f.rx_pkt_var == doctest::Approx(nr.var).epsilon(1e-9));
  }
}

TEST_CASE("http session extraction") {
  std::string req =
      "GET / HTTP/1.1\r\nHost: news.example.org\r\nUser-Agent: Dalvik/2.1.0 (Linux; U; Android "
      "5.0.1; X)\r\nCookie: a=1\r\n\r\n";
  std::string resp = "HTTP/1.1 200 OK\r\nContent-Type: text/html\r\nContent-Length: 12\r\n\r\n"
                     "<html></html>";
  Session s = make_session({{req.begin(), req.end()}}, {{resp.begin(), resp.end()}}, 80);
  SessionFeatures f = extract_session_features(s);
  REQUIRE(f.app.has_value());
  CHECK(f.app->protocol == AppProtocol::HTTP);
  CHECK(f.domain_name == "news.example.org");
  CHECK(f.app->cookie_count == 1);
  CHECK(f.app->content_type == "text/html");
  CHECK(f.app->os_version == "Android 5.0.1");
  CHECK(f.dpi.has_value());
}

TEST_CASE("udp dns session yields no app features") {
  Session s = make_session({blob(30)}, {blob(100)}, 53, Transport::UDP);
  SessionFeatures f = extract_session_features(s);
  CHECK(!f.app.has_value());
  CHECK(!f.dpi.has_value());
  CHECK(!f.domain_name.has_value());
  CHECK(f.stat.bytes_total == 130);
}

TEST_CASE("opaque traffic on port 80 degrades to no app features") {
  Session s = make_session({blob(40)}, {blob(40)}, 80);
  SessionFeatures f = extract_session_features(s);
  CHECK(!f.app.has_value());
  CHECK(!f.dpi.has_value());
}

TEST_CASE("feature csv row marks absent groups NA") {
  Session s = make_session({blob(30)}, {}, 9999);
  SessionFeatures f = extract_session_features(s);
  std::string row = session_features_csv_row(f);
  auto cells = csv_parse_line(row);
  auto header = csv_parse_line(session_features_csv_header());
  REQUIRE(cells.size() == header.size());
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "app_protocol" || header[i] == "domain_name" ||
        header[i] == "dpi_form_count")
      CHECK(cells[i] == "NA");
    if (header[i] == "stat_bytes_total") CHECK(cells[i] == "30");
  }
}
