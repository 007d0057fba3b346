#include "netprof/session_features.hpp"

#include <algorithm>
#include <cmath>

#include "netprof/http_parser.hpp"
#include "netprof/util.hpp"

namespace netprof {

const char* app_protocol_name(AppProtocol p) {
  switch (p) {
    case AppProtocol::HTTP: return "HTTP";
    case AppProtocol::HTTPS: return "HTTPS";
    default: return "OTHER";
  }
}

namespace {

struct DirStats {
  double mx = 0, mn = 0, mean = 0, median = 0, var = 0, sum = 0;
};

DirStats direction_stats(const std::vector<double>& sizes_in) {
  DirStats d;
  std::vector<double> sizes;
  sizes.reserve(sizes_in.size());
  double sum_all = 0;
  for (double s : sizes_in) {
    sum_all += s;
    if (s > 0) sizes.push_back(s);
  }
  d.sum = sum_all;
  if (sizes.empty()) return d;
  std::sort(sizes.begin(), sizes.end());
  d.mn = sizes.front();
  d.mx = sizes.back();
  double total = 0;
  for (double s : sizes) total += s;
  d.mean = total / static_cast<double>(sizes.size());
  size_t n = sizes.size();
  d.median = n % 2 ? sizes[n / 2] : (sizes[n / 2 - 1] + sizes[n / 2]) / 2.0;
  double ss = 0;
  for (double s : sizes) ss += (s - d.mean) * (s - d.mean);
  d.var = ss / static_cast<double>(n);  // population variance
  return d;
}

}  // namespace

StatFeatures statistical_features(const std::vector<double>& tx_sizes,
                                  const std::vector<double>& rx_sizes) {
  StatFeatures f;
  DirStats tx = direction_stats(tx_sizes);
  DirStats rx = direction_stats(rx_sizes);
  f.tx_pkt_max = tx.mx;
  f.tx_pkt_min = tx.mn;
  f.tx_pkt_mean = tx.mean;
  f.tx_pkt_median = tx.median;
  f.tx_pkt_var = tx.var;
  f.rx_pkt_max = rx.mx;
  f.rx_pkt_min = rx.mn;
  f.rx_pkt_mean = rx.mean;
  f.rx_pkt_median = rx.median;
  f.rx_pkt_var = rx.var;
  f.bytes_tx = tx.sum;
  f.bytes_rx = rx.sum;
  f.bytes_total = tx.sum + rx.sum;
  f.tx_rx_ratio = f.bytes_tx / std::max(f.bytes_rx, 1.0);
  return f;
}

StatFeatures statistical_features(const Session& s) {
  std::vector<double> tx, rx;
  tx.reserve(s.client_packets.size());
  rx.reserve(s.server_packets.size());
  for (const auto& p : s.client_packets) tx.push_back(static_cast<double>(p.payload_len()));
  for (const auto& p : s.server_packets) rx.push_back(static_cast<double>(p.payload_len()));
  return statistical_features(tx, rx);
}

namespace {

std::optional<AppFeatures> http_features(const std::vector<HttpTransaction>& txns,
                                         std::optional<std::string>& domain) {
  if (txns.empty()) return std::nullopt;
  AppFeatures app;
  app.protocol = AppProtocol::HTTP;
  int cookies = 0;
  for (const auto& t : txns) {
    cookies += t.request_cookie_count;
    if (!domain && t.host) domain = t.host;
    if (!app.content_type && t.response_content_type)
      app.content_type = media_type(*t.response_content_type);
    if (!app.os_version && t.user_agent) app.os_version = parse_user_agent_os(*t.user_agent);
  }
  app.cookie_count = cookies;
  return app;
}

AppFeatures tls_features(const TlsSummary& tls, std::optional<std::string>& domain) {
  AppFeatures app;
  app.protocol = AppProtocol::HTTPS;
  app.tls_version = tls.version;
  app.cert_expired = tls.cert_expired;
  app.cert_self_signed = tls.cert_self_signed;
  if (tls.sni) domain = tls.sni;
  return app;
}

}  // namespace

SessionFeatures extract_session_features(const Session& s) {
  SessionFeatures f;
  f.session_id = s.session_id;
  f.subject_id = s.subject_id;
  f.transport = s.tuple.transport;
  f.server_port = s.tuple.server_port;
  f.stat = statistical_features(s);
  f.bytes_total = f.stat.bytes_total;

  std::vector<uint8_t> cbytes = s.client_bytes();
  std::vector<uint8_t> sbytes = s.server_bytes();
  if (cbytes.empty() && sbytes.empty()) return f;

  // content shape wins over port numbers
  bool try_http = looks_like_http_request(cbytes);
  bool try_tls = !try_http && looks_like_tls(cbytes);
  if (!try_http && !try_tls) {
    if (f.server_port == 80) try_http = true;
    else if (f.server_port == 443) try_tls = true;
  }

  if (try_http) {
    try {
      auto txns = parse_http(cbytes, sbytes);
      if (auto app = http_features(txns, f.domain_name)) {
        f.app = app;
        f.dpi = dpi_scan(txns);
      }
    } catch (const NotHttpError&) {
      if (looks_like_tls(cbytes)) try_tls = true;
    }
  }
  if (try_tls && !f.app) {
    try {
      f.app = tls_features(parse_tls(cbytes, sbytes, s.start_time), f.domain_name);
    } catch (const NotTlsError&) {
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// per-session CSV

namespace {

std::string opt_str(const std::optional<std::string>& v) { return v ? csv_escape(*v) : "NA"; }
std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "NA"; }
std::string tri(TriState t) {
  switch (t) {
    case TriState::TRUE_: return "1";
    case TriState::FALSE_: return "0";
    default: return "NA";
  }
}

}  // namespace

std::string session_features_csv_header() {
  return "session_id,subject_id,transport,server_port,"
         "stat_tx_pkt_max,stat_tx_pkt_min,stat_tx_pkt_mean,stat_tx_pkt_median,stat_tx_pkt_var,"
         "stat_rx_pkt_max,stat_rx_pkt_min,stat_rx_pkt_mean,stat_rx_pkt_median,stat_rx_pkt_var,"
         "stat_bytes_total,stat_bytes_tx,stat_bytes_rx,stat_tx_rx_ratio,"
         "app_protocol,app_tls_version,app_cert_expired,app_cert_self_signed,"
         "app_cookie_count,app_content_type,app_os_version,"
         "dpi_form_count,dpi_has_email_field,dpi_has_username_field,dpi_has_password_field,"
         "dpi_download_count,dpi_download_types,domain_name";
}

std::string session_features_csv_row(const SessionFeatures& f) {
  std::string row;
  row += csv_escape(f.session_id);
  row += ',';
  row += csv_escape(f.subject_id);
  row += ',';
  row += transport_name(f.transport);
  row += ',';
  row += std::to_string(f.server_port);
  const double stats[] = {f.stat.tx_pkt_max,  f.stat.tx_pkt_min, f.stat.tx_pkt_mean,
                          f.stat.tx_pkt_median, f.stat.tx_pkt_var, f.stat.rx_pkt_max,
                          f.stat.rx_pkt_min,  f.stat.rx_pkt_mean, f.stat.rx_pkt_median,
                          f.stat.rx_pkt_var,  f.stat.bytes_total, f.stat.bytes_tx,
                          f.stat.bytes_rx,    f.stat.tx_rx_ratio};
  for (double v : stats) {
    row += ',';
    row += fmt_double(v);
  }
  if (f.app) {
    row += ',';
    row += app_protocol_name(f.app->protocol);
    row += ',';
    row += f.app->tls_version ? tls_version_name(*f.app->tls_version) : "NA";
    row += ',';
    row += tri(f.app->cert_expired);
    row += ',';
    row += tri(f.app->cert_self_signed);
    row += ',';
    row += opt_int(f.app->cookie_count);
    row += ',';
    row += opt_str(f.app->content_type);
    row += ',';
    row += opt_str(f.app->os_version);
  } else {
    row += ",NA,NA,NA,NA,NA,NA,NA";
  }
  if (f.dpi) {
    row += ',';
    row += std::to_string(f.dpi->form_count);
    row += ',';
    row += f.dpi->has_email_field ? "1" : "0";
    row += ',';
    row += f.dpi->has_username_field ? "1" : "0";
    row += ',';
    row += f.dpi->has_password_field ? "1" : "0";
    row += ',';
    row += std::to_string(f.dpi->downloaded_file_count);
    std::string types;
    for (const auto& [tag, n] : f.dpi->downloaded_file_types) {
      for (int i = 0; i < n; ++i) {
        if (!types.empty()) types += ';';
        types += tag;
      }
    }
    row += ',';
    row += csv_escape(types);
  } else {
    row += ",NA,NA,NA,NA,NA,NA";
  }
  row += ',';
  row += opt_str(f.domain_name);
  return row;
}

}  // namespace netprof
