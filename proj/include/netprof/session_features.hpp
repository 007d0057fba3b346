#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netprof/dpi.hpp"
#include "netprof/sessionizer.hpp"
#include "netprof/tls_parser.hpp"

namespace netprof {

// Size statistics over payload bytes per direction. Zero-payload
// packets (pure ACKs) do not enter the statistics; a direction with no
// payload packets reports zeros.
struct StatFeatures {
  double tx_pkt_max = 0, tx_pkt_min = 0, tx_pkt_mean = 0, tx_pkt_median = 0, tx_pkt_var = 0;
  double rx_pkt_max = 0, rx_pkt_min = 0, rx_pkt_mean = 0, rx_pkt_median = 0, rx_pkt_var = 0;
  double bytes_total = 0, bytes_tx = 0, bytes_rx = 0;
  double tx_rx_ratio = 0;  // bytes_tx / max(bytes_rx, 1)
};

enum class AppProtocol : uint8_t { HTTP, HTTPS, OTHER };
const char* app_protocol_name(AppProtocol p);

struct AppFeatures {
  AppProtocol protocol = AppProtocol::OTHER;
  // HTTPS side
  std::optional<TlsVersion> tls_version;
  TriState cert_expired = TriState::UNKNOWN;
  TriState cert_self_signed = TriState::UNKNOWN;
  // HTTP side
  std::optional<int> cookie_count;
  std::optional<std::string> content_type;  // media type, lowercased
  std::optional<std::string> os_version;
};

struct SessionFeatures {
  std::string session_id;
  std::string subject_id;
  Transport transport = Transport::TCP;
  int server_port = 0;
  StatFeatures stat;
  std::optional<AppFeatures> app;
  std::optional<DpiScan> dpi;
  std::optional<std::string> domain_name;
  double bytes_total = 0;
};

StatFeatures statistical_features(const std::vector<double>& tx_sizes,
                                  const std::vector<double>& rx_sizes);
StatFeatures statistical_features(const Session& s);

// Runs the statistical group always; picks HTTP or TLS parsing by
// payload shape first, then by server port; parser misses degrade to
// absent feature groups.
SessionFeatures extract_session_features(const Session& s);

// fixed-order per-session CSV with NA for absent values
std::string session_features_csv_header();
std::string session_features_csv_row(const SessionFeatures& f);

}  // namespace netprof
