#include "netprof/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "netprof/pcap_io.hpp"
#include "netprof/rng.hpp"
#include "netprof/sessionizer.hpp"
#include "netprof/subject_map.hpp"
#include "netprof/synth.hpp"
#include "netprof/util.hpp"

#include "json.hpp"

namespace netprof {

using nlohmann::json;
namespace fs = std::filesystem;

namespace pipeline {

const char* kPacketsFile = "packets.jsonl";
const char* kSessionsFile = "sessions.jsonl";
const char* kSessionLogFile = "session_log.tsv";
const char* kFeaturesFile = "session_features.csv";
const char* kEnrichedFile = "enriched_features.csv";
const char* kDatasetFile = "dataset.csv";
const char* kSchemaFile = "feature_schema.json";
const char* kImportanceFile = "importance_summary.json";
const char* kSummaryFile = "report_summary.txt";

namespace {

std::string out_path(const PipelineConfig& cfg, const char* name) {
  return (fs::path(cfg.output_dir) / name).string();
}

std::string flags_to_string(uint8_t flags) {
  std::string s;
  if (flags & tcpflag::SYN) s += 'S';
  if (flags & tcpflag::ACK) s += 'A';
  if (flags & tcpflag::FIN) s += 'F';
  if (flags & tcpflag::RST) s += 'R';
  if (flags & tcpflag::PSH) s += 'P';
  return s;
}

uint8_t flags_from_string(const std::string& s) {
  uint8_t f = 0;
  for (char c : s) {
    if (c == 'S') f |= tcpflag::SYN;
    else if (c == 'A') f |= tcpflag::ACK;
    else if (c == 'F') f |= tcpflag::FIN;
    else if (c == 'R') f |= tcpflag::RST;
    else if (c == 'P') f |= tcpflag::PSH;
  }
  return f;
}

Transport transport_from_name(const std::string& s) {
  if (s == "TCP") return Transport::TCP;
  if (s == "UDP") return Transport::UDP;
  return Transport::OTHER;
}

}  // namespace

// ---------------------------------------------------------------------------
// ingest: captures + subject map -> packets.jsonl

void ingest(const PipelineConfig& cfg) {
  try {
    if (cfg.capture_paths.empty()) throw std::runtime_error("no capture files configured");
    SubjectMap map = SubjectMap::load(cfg.subject_map_path);
    fs::create_directories(cfg.output_dir);
    std::ofstream out(out_path(cfg, kPacketsFile));
    if (!out) throw std::runtime_error("cannot write " + out_path(cfg, kPacketsFile));
    out << json{{"kind", "header"}, {"schema_version", 1}}.dump() << "\n";

    uint64_t records = 0, emitted = 0, skipped = 0, truncated = 0, unmatched = 0;
    for (const auto& path : cfg.capture_paths) {
      PcapReader reader(path);
      Packet p;
      while (reader.next(p)) {
        auto subject = map.assign(p);
        if (!subject) {
          unmatched++;
          continue;
        }
        json j{{"kind", "packet"},
               {"subject", *subject},
               {"ts", p.timestamp},
               {"src", p.src_ip.to_string()},
               {"sport", p.src_port},
               {"dst", p.dst_ip.to_string()},
               {"dport", p.dst_port},
               {"transport", transport_name(p.transport)},
               {"flags", flags_to_string(p.tcp_flags)},
               {"payload", hex_encode(p.payload)}};
        out << j.dump() << "\n";
      }
      records += reader.stats().records;
      emitted += reader.stats().emitted;
      skipped += reader.stats().skipped_non_ip;
      truncated += reader.stats().truncated;
    }
    out << json{{"kind", "summary"},
                {"records", records},
                {"emitted", emitted},
                {"skipped_non_ip", skipped},
                {"truncated", truncated},
                {"unmatched", unmatched}}
               .dump()
        << "\n";
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("ingest", e.what());
  }
}

// ---------------------------------------------------------------------------
// sessionize: packets.jsonl -> sessions.jsonl + session_log.tsv

void sessionize_stage(const PipelineConfig& cfg) {
  try {
    std::ifstream in(out_path(cfg, kPacketsFile));
    if (!in) throw std::runtime_error("missing " + std::string(kPacketsFile) + " (run ingest)");

    // per-subject sequential feeding preserves capture order
    std::map<std::string, Sessionizer> workers;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      if (j["kind"] != "packet") continue;
      std::string subject = j["subject"].get<std::string>();
      Packet p;
      p.timestamp = j["ts"].get<int64_t>();
      p.src_ip = IpAddr::parse(j["src"].get<std::string>());
      p.dst_ip = IpAddr::parse(j["dst"].get<std::string>());
      p.src_port = j["sport"].get<uint16_t>();
      p.dst_port = j["dport"].get<uint16_t>();
      p.transport = transport_from_name(j["transport"].get<std::string>());
      p.tcp_flags = p.transport == Transport::TCP ? flags_from_string(j["flags"].get<std::string>()) : 0;
      p.payload = hex_decode(j["payload"].get<std::string>());
      auto it = workers.find(subject);
      if (it == workers.end()) it = workers.emplace(subject, Sessionizer(subject)).first;
      it->second.feed(p);
    }

    std::ofstream out(out_path(cfg, kSessionsFile));
    std::ofstream log(out_path(cfg, kSessionLogFile));
    out << json{{"kind", "header"}, {"schema_version", 1}}.dump() << "\n";
    uint64_t total_sessions = 0, total_orphans = 0;
    for (auto& [subject, worker] : workers) {
      for (const Session& s : worker.flush()) {
        std::vector<int> client_sizes, server_sizes;
        for (const auto& p : s.client_packets)
          client_sizes.push_back(static_cast<int>(p.payload_len()));
        for (const auto& p : s.server_packets)
          server_sizes.push_back(static_cast<int>(p.payload_len()));
        json j{{"kind", "session"},
               {"id", s.session_id},
               {"subject", s.subject_id},
               {"client_ip", s.tuple.client_ip.to_string()},
               {"client_port", s.tuple.client_port},
               {"server_ip", s.tuple.server_ip.to_string()},
               {"server_port", s.tuple.server_port},
               {"transport", transport_name(s.tuple.transport)},
               {"start", s.start_time},
               {"end", s.end_time},
               {"close", close_reason_name(s.close_reason)},
               {"midstream", s.midstream},
               {"client_sizes", client_sizes},
               {"server_sizes", server_sizes},
               {"client_payload", hex_encode(s.client_bytes())},
               {"server_payload", hex_encode(s.server_bytes())}};
        out << j.dump() << "\n";
        log << session_log_line(s) << "\n";
        total_sessions++;
      }
      total_orphans += worker.orphan_count();
    }
    out << json{{"kind", "summary"}, {"sessions", total_sessions}, {"orphans", total_orphans}}.dump()
        << "\n";
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("sessionize", e.what());
  }
}

// ---------------------------------------------------------------------------
// features: sessions.jsonl -> session_features.csv

namespace {

Session session_from_json(const json& j) {
  Session s;
  s.session_id = j["id"].get<std::string>();
  s.subject_id = j["subject"].get<std::string>();
  s.tuple.client_ip = IpAddr::parse(j["client_ip"].get<std::string>());
  s.tuple.client_port = j["client_port"].get<uint16_t>();
  s.tuple.server_ip = IpAddr::parse(j["server_ip"].get<std::string>());
  s.tuple.server_port = j["server_port"].get<uint16_t>();
  s.tuple.transport = transport_from_name(j["transport"].get<std::string>());
  s.start_time = j["start"].get<int64_t>();
  s.end_time = j["end"].get<int64_t>();
  s.midstream = j["midstream"].get<bool>();
  auto client_payload = hex_decode(j["client_payload"].get<std::string>());
  auto server_payload = hex_decode(j["server_payload"].get<std::string>());
  // rebuild per-packet payloads by the recorded sizes
  size_t off = 0;
  for (int sz : j["client_sizes"].get<std::vector<int>>()) {
    Packet p;
    p.timestamp = s.start_time;
    p.src_ip = s.tuple.client_ip;
    p.dst_ip = s.tuple.server_ip;
    p.src_port = s.tuple.client_port;
    p.dst_port = s.tuple.server_port;
    p.transport = s.tuple.transport;
    p.payload.assign(client_payload.begin() + off, client_payload.begin() + off + sz);
    off += static_cast<size_t>(sz);
    s.client_packets.push_back(std::move(p));
  }
  off = 0;
  for (int sz : j["server_sizes"].get<std::vector<int>>()) {
    Packet p;
    p.timestamp = s.start_time;
    p.src_ip = s.tuple.server_ip;
    p.dst_ip = s.tuple.client_ip;
    p.src_port = s.tuple.server_port;
    p.dst_port = s.tuple.client_port;
    p.transport = s.tuple.transport;
    p.payload.assign(server_payload.begin() + off, server_payload.begin() + off + sz);
    off += static_cast<size_t>(sz);
    s.server_packets.push_back(std::move(p));
  }
  return s;
}

}  // namespace

void features(const PipelineConfig& cfg) {
  try {
    std::ifstream in(out_path(cfg, kSessionsFile));
    if (!in) throw std::runtime_error("missing " + std::string(kSessionsFile) + " (run sessionize)");
    std::ofstream out(out_path(cfg, kFeaturesFile));
    out << session_features_csv_header() << "\n";
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      if (j["kind"] != "session") continue;
      Session s = session_from_json(j);
      out << session_features_csv_row(extract_session_features(s)) << "\n";
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("features", e.what());
  }
}

// ---------------------------------------------------------------------------
// enrich: session_features.csv -> enriched_features.csv

namespace {

const char* kDomainColumns =
    "domain_rank,domain_score_good_site,domain_score_trustworthiness,domain_score_child_safety,"
    "domain_flag_scam,domain_flag_spam,domain_flag_malware_or_viruses,domain_flag_privacy_risks,"
    "domain_flag_phishing,domain_category";

Taxonomy load_taxonomy(const PipelineConfig& cfg) {
  if (cfg.taxonomy_path.empty()) {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& line : split(default_taxonomy_tsv(), '\n')) {
      if (line.empty()) continue;
      auto parts = split(line, '\t');
      pairs.emplace_back(parts[0], parts[1]);
    }
    return Taxonomy::from_pairs(pairs);
  }
  return Taxonomy::load(cfg.taxonomy_path);
}

}  // namespace

void enrich(const PipelineConfig& cfg) {
  try {
    std::ifstream in(out_path(cfg, kFeaturesFile));
    if (!in) throw std::runtime_error("missing " + std::string(kFeaturesFile) + " (run features)");
    FixtureProvider provider = FixtureProvider::load(cfg.fixture_store_path);
    Taxonomy taxonomy = load_taxonomy(cfg);
    Enricher enricher(provider, taxonomy, cfg.strict_mode,
                      out_path(cfg, "enrichment_cache.jsonl"));
    // truncate a stale cache log so reruns are byte-identical
    std::ofstream(out_path(cfg, "enrichment_cache.jsonl"), std::ios::trunc);

    std::ofstream out(out_path(cfg, kEnrichedFile));
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::string> header = csv_parse_line(line);
    int domain_col = -1;
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == "domain_name") domain_col = static_cast<int>(i);
    if (domain_col < 0) throw std::runtime_error("features file lacks domain_name column");
    out << line << "," << kDomainColumns << "\n";

    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cells = csv_parse_line(line);
      std::string domain = cells[domain_col];
      std::string extra;
      if (domain == "NA" || domain.empty()) {
        extra = "NA,NA,NA,NA,NA,NA,NA,NA,NA,NA";
      } else {
        DomainInfo info = enricher.enrich(domain);
        auto optnum = [](const std::optional<double>& v) {
          return v ? fmt_double(*v) : std::string("NA");
        };
        extra = (info.popularity_rank ? std::to_string(*info.popularity_rank) : "NA");
        extra += "," + optnum(info.score_good_site);
        extra += "," + optnum(info.score_trustworthiness);
        extra += "," + optnum(info.score_child_safety);
        extra += info.flag_scam ? ",1" : ",0";
        extra += info.flag_spam ? ",1" : ",0";
        extra += info.flag_malware_or_viruses ? ",1" : ",0";
        extra += info.flag_privacy_risks ? ",1" : ",0";
        extra += info.flag_phishing ? ",1" : ",0";
        extra += "," + csv_escape(info.general_category);
      }
      out << line << "," << extra << "\n";
    }
    json diag{{"provider_calls", enricher.provider_calls()},
              {"degraded_lookups", enricher.degraded_lookups()},
              {"unknown_source_labels", enricher.unknown_source_labels()}};
    write_text_file(out_path(cfg, "enrich_diagnostics.json"), diag.dump(2) + "\n");
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("enrich", e.what());
  }
}

// ---------------------------------------------------------------------------
// aggregate: enriched_features.csv + labels.csv -> dataset.csv

namespace {

std::optional<double> cell_num(const std::string& s) {
  if (s == "NA" || s.empty()) return std::nullopt;
  return std::stod(s);
}

EnrichedSession enriched_from_cells(const std::map<std::string, int>& col,
                                    const std::vector<std::string>& cells) {
  auto get = [&](const char* name) -> const std::string& {
    return cells[static_cast<size_t>(col.at(name))];
  };
  EnrichedSession es;
  SessionFeatures& f = es.features;
  f.session_id = get("session_id");
  f.subject_id = get("subject_id");
  f.transport = transport_from_name(get("transport"));
  f.server_port = std::stoi(get("server_port"));
  f.stat.tx_pkt_max = *cell_num(get("stat_tx_pkt_max"));
  f.stat.tx_pkt_min = *cell_num(get("stat_tx_pkt_min"));
  f.stat.tx_pkt_mean = *cell_num(get("stat_tx_pkt_mean"));
  f.stat.tx_pkt_median = *cell_num(get("stat_tx_pkt_median"));
  f.stat.tx_pkt_var = *cell_num(get("stat_tx_pkt_var"));
  f.stat.rx_pkt_max = *cell_num(get("stat_rx_pkt_max"));
  f.stat.rx_pkt_min = *cell_num(get("stat_rx_pkt_min"));
  f.stat.rx_pkt_mean = *cell_num(get("stat_rx_pkt_mean"));
  f.stat.rx_pkt_median = *cell_num(get("stat_rx_pkt_median"));
  f.stat.rx_pkt_var = *cell_num(get("stat_rx_pkt_var"));
  f.stat.bytes_total = *cell_num(get("stat_bytes_total"));
  f.stat.bytes_tx = *cell_num(get("stat_bytes_tx"));
  f.stat.bytes_rx = *cell_num(get("stat_bytes_rx"));
  f.stat.tx_rx_ratio = *cell_num(get("stat_tx_rx_ratio"));
  f.bytes_total = f.stat.bytes_total;

  const std::string& proto = get("app_protocol");
  if (proto != "NA") {
    AppFeatures app;
    app.protocol = proto == "HTTP" ? AppProtocol::HTTP
                                   : (proto == "HTTPS" ? AppProtocol::HTTPS : AppProtocol::OTHER);
    const std::string& tlsv = get("app_tls_version");
    if (tlsv != "NA") {
      for (TlsVersion v : {TlsVersion::SSL3, TlsVersion::TLS1_0, TlsVersion::TLS1_1,
                           TlsVersion::TLS1_2, TlsVersion::UNKNOWN})
        if (tlsv == tls_version_name(v)) app.tls_version = v;
    }
    auto tri_of = [](const std::string& s) {
      if (s == "1") return TriState::TRUE_;
      if (s == "0") return TriState::FALSE_;
      return TriState::UNKNOWN;
    };
    app.cert_expired = tri_of(get("app_cert_expired"));
    app.cert_self_signed = tri_of(get("app_cert_self_signed"));
    if (auto v = cell_num(get("app_cookie_count"))) app.cookie_count = static_cast<int>(*v);
    if (get("app_content_type") != "NA") app.content_type = get("app_content_type");
    if (get("app_os_version") != "NA") app.os_version = get("app_os_version");
    f.app = std::move(app);
  }

  if (get("dpi_form_count") != "NA") {
    DpiScan dpi;
    dpi.form_count = static_cast<int>(*cell_num(get("dpi_form_count")));
    dpi.has_email_field = get("dpi_has_email_field") == "1";
    dpi.has_username_field = get("dpi_has_username_field") == "1";
    dpi.has_password_field = get("dpi_has_password_field") == "1";
    dpi.downloaded_file_count = static_cast<int>(*cell_num(get("dpi_download_count")));
    f.dpi = std::move(dpi);
  }

  if (get("domain_name") != "NA") {
    f.domain_name = get("domain_name");
    DomainInfo info;
    if (auto v = cell_num(get("domain_rank"))) info.popularity_rank = static_cast<int64_t>(*v);
    info.score_good_site = cell_num(get("domain_score_good_site"));
    info.score_trustworthiness = cell_num(get("domain_score_trustworthiness"));
    info.score_child_safety = cell_num(get("domain_score_child_safety"));
    info.flag_scam = get("domain_flag_scam") == "1";
    info.flag_spam = get("domain_flag_spam") == "1";
    info.flag_malware_or_viruses = get("domain_flag_malware_or_viruses") == "1";
    info.flag_privacy_risks = get("domain_flag_privacy_risks") == "1";
    info.flag_phishing = get("domain_flag_phishing") == "1";
    info.general_category = get("domain_category");
    es.domain = std::move(info);
  }
  return es;
}

}  // namespace

void aggregate(const PipelineConfig& cfg) {
  try {
    std::ifstream in(out_path(cfg, kEnrichedFile));
    if (!in) throw std::runtime_error("missing " + std::string(kEnrichedFile) + " (run enrich)");
    auto labels = load_labels_csv(cfg.labels_path);
    Taxonomy taxonomy = load_taxonomy(cfg);

    std::string line;
    std::getline(in, line);
    auto header = csv_parse_line(line);
    std::map<std::string, int> col;
    for (size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);

    std::map<std::string, std::vector<EnrichedSession>> by_subject;
    std::set<std::string> os_versions, content_types;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto cells = csv_parse_line(line);
      EnrichedSession es = enriched_from_cells(col, cells);
      if (es.features.app) {
        if (es.features.app->os_version) os_versions.insert(*es.features.app->os_version);
        if (es.features.app->content_type) content_types.insert(*es.features.app->content_type);
      }
      by_subject[es.features.subject_id].push_back(std::move(es));
    }
    if (by_subject.empty()) throw std::runtime_error("no sessions to aggregate");

    FeatureSchema schema = FeatureSchema::build(
        taxonomy.canonical_categories(),
        std::vector<std::string>(os_versions.begin(), os_versions.end()),
        std::vector<std::string>(content_types.begin(), content_types.end()));

    std::vector<SubjectRecord> records;
    for (const auto& [subject, sessions] : by_subject) {
      auto it = labels.find(subject);
      if (it == labels.end())
        throw LabelsMissingError("subject '" + subject + "' has sessions but no labels row");
      records.push_back(aggregate_subject(sessions, subject, it->second, schema));
    }
    auto imputed = impute_records(records);
    write_text_file(out_path(cfg, kDatasetFile), dataset_csv(imputed, schema));
    write_text_file(out_path(cfg, kSchemaFile), schema.to_json());
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("aggregate", e.what());
  }
}

// ---------------------------------------------------------------------------
// train: dataset.csv -> report_<label>.json per label

namespace {

json grid_entry_json(const ml::GridEntry& e) {
  return json{{"algorithm", ml::algo_name(e.config.algorithm)},
              {"features", e.config.k_features},
              {"accuracy", e.result.accuracy},
              {"wauc", e.result.wauc},
              {"w_precision", e.result.w_precision},
              {"w_recall", e.result.w_recall},
              {"f1", e.result.f1}};
}

uint64_t fnv_label(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) h = (h ^ static_cast<uint8_t>(c)) * 1099511628211ULL;
  return h;
}

}  // namespace

void train(const PipelineConfig& cfg) {
  try {
    auto loaded = load_dataset_csv(out_path(cfg, kDatasetFile));
    std::vector<std::string> targets = cfg.train_labels;
    if (targets.empty())
      for (const auto& d : label_schema()) targets.push_back(d.name);

    for (const auto& label : targets) {
      Dataset ds = dataset_from_loaded(loaded, label);
      ml::GridSpec grid = cfg.grid;
      grid.base.seed = cfg.seed;
      ml::GridResult res = ml::grid_search(ds, grid, cfg.threads);

      // final model with the best-WAUC config for the importance view
      ml::ModelConfig final_cfg = res.best(ml::ReportMode::WAUC).config;
      final_cfg.seed = substream(cfg.seed, fnv_label(label));
      ml::TrainedEnsemble final_model = ml::train(ds, final_cfg, cfg.threads);
      auto ranked = ml::feature_importance(final_model);

      json top = json::array();
      for (size_t i = 0; i < ranked.size() && i < 5; ++i) {
        const std::string& name = ds.feature_names[ranked[i].first];
        top.push_back(json{{"name", name},
                           {"importance", ranked[i].second},
                           {"category", FeatureSchema::category_of(name)}});
      }

      json grid_json = json::array();
      for (const auto& e : res.entries) grid_json.push_back(grid_entry_json(e));
      json j{{"schema_version", 1},
             {"label", label},
             {"n_subjects", ds.n()},
             {"classes", ds.class_list},
             {"grid", grid_json},
             {"best_f1", grid_entry_json(res.entries[res.best_f1])},
             {"best_wauc", grid_entry_json(res.entries[res.best_wauc])},
             {"top_features", top}};
      write_text_file(out_path(cfg, ("report_" + label + ".json").c_str()), j.dump(2) + "\n");
      if (cfg.write_models)
        write_text_file(out_path(cfg, ("model_" + label + ".json").c_str()),
                        final_model.to_json() + "\n");
    }
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("train", e.what());
  }
}

// ---------------------------------------------------------------------------
// report: per-label reports -> summary table + importance tally

void report(const PipelineConfig& cfg) {
  try {
    std::map<std::string, std::vector<std::pair<std::string, double>>> top_per_label;
    std::ostringstream table;
    table << "label\talgo\tfeatures\taccuracy\twauc\tw_precision\tw_recall\tf1\n";
    bool any = false;
    for (const auto& def : label_schema()) {
      std::string path = out_path(cfg, ("report_" + def.name + ".json").c_str());
      std::ifstream in(path);
      if (!in) continue;
      any = true;
      json j = json::parse(std::string(std::istreambuf_iterator<char>(in), {}));
      const json& best = j["best_f1"];
      char row[256];
      std::snprintf(row, sizeof(row), "%s\t%s\t%d\t%.3f\t%.3f\t%.3f\t%.3f\t%.3f\n",
                    def.name.c_str(), best["algorithm"].get<std::string>().c_str(),
                    best["features"].get<int>(), best["accuracy"].get<double>(),
                    best["wauc"].get<double>(), best["w_precision"].get<double>(),
                    best["w_recall"].get<double>(), best["f1"].get<double>());
      table << row;
      std::vector<std::pair<std::string, double>> feats;
      for (const auto& tf : j["top_features"])
        feats.emplace_back(tf["name"].get<std::string>(), tf["importance"].get<double>());
      top_per_label[def.name] = std::move(feats);
    }
    if (!any) throw std::runtime_error("no report_<label>.json files found (run train)");

    ImportanceSummary s = importance_summary(top_per_label);
    json per_label = json::object();
    for (const auto& [label, feats] : top_per_label) {
      json arr = json::array();
      for (const auto& [name, imp] : feats)
        arr.push_back(json{{"name", name},
                           {"importance", imp},
                           {"category", FeatureSchema::category_of(name)}});
      per_label[label] = std::move(arr);
    }
    json out{{"schema_version", 1},
             {"counts", s.counts},
             {"percents", s.percents},
             {"total", s.total},
             {"per_label_top5", per_label}};
    write_text_file(out_path(cfg, kImportanceFile), out.dump(2) + "\n");

    table << "\nimportance by category:\n";
    for (const auto& [cat, n] : s.counts) {
      char row[128];
      std::snprintf(row, sizeof(row), "  %-24s %3d (%.0f%%)\n", cat.c_str(), n, s.percents[cat]);
      table << row;
    }
    write_text_file(out_path(cfg, kSummaryFile), table.str());
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError("report", e.what());
  }
}

void run(const PipelineConfig& cfg) {
  ingest(cfg);
  sessionize_stage(cfg);
  features(cfg);
  enrich(cfg);
  aggregate(cfg);
  train(cfg);
  report(cfg);
}

}  // namespace pipeline

ImportanceSummary importance_summary(
    const std::map<std::string, std::vector<std::pair<std::string, double>>>& top_per_label) {
  ImportanceSummary s;
  s.counts = {{"domain", 0},
              {"deep_packet_inspection", 0},
              {"statistical", 0},
              {"application_layer", 0}};
  for (const auto& [label, feats] : top_per_label) {
    for (const auto& [name, imp] : feats) {
      s.counts[FeatureSchema::category_of(name)]++;
      s.total++;
    }
  }
  for (const auto& [cat, n] : s.counts)
    s.percents[cat] = s.total ? 100.0 * n / s.total : 0.0;
  return s;
}

}  // namespace netprof
