#include "netprof/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "netprof/der.hpp"
#include "netprof/domain_enrichment.hpp"
#include "netprof/dpi.hpp"
#include "netprof/pcap_io.hpp"
#include "netprof/rng.hpp"
#include "netprof/subject_dataset.hpp"
#include "netprof/util.hpp"

#include "json.hpp"

namespace netprof {

using nlohmann::json;
namespace fs = std::filesystem;

std::string default_taxonomy_tsv() {
  // source label -> canonical category; the canonical set is the
  // declared 32-value list
  return "search\tSEARCH\n"
         "searchengines\tSEARCH\n"
         "news\tNEWS\n"
         "press\tNEWS\n"
         "socialnetworking\tSOCIAL_NETWORK\n"
         "social\tSOCIAL_NETWORK\n"
         "education\tEDUCATION\n"
         "schools\tEDUCATION\n"
         "shopping\tSHOPPING\n"
         "ecommerce\tSHOPPING\n"
         "adult\tADULT\n"
         "porn\tADULT\n"
         "gambling\tGAMBLING\n"
         "casino\tGAMBLING\n"
         "games\tGAMES\n"
         "gaming\tGAMES\n"
         "sports\tSPORTS\n"
         "sport\tSPORTS\n"
         "finance\tFINANCE\n"
         "banking\tFINANCE\n"
         "travel\tTRAVEL\n"
         "tourism\tTRAVEL\n"
         "health\tHEALTH\n"
         "medical\tHEALTH\n"
         "webmail\tEMAIL\n"
         "email\tEMAIL\n"
         "streaming\tSTREAMING_MEDIA\n"
         "video\tSTREAMING_MEDIA\n"
         "music\tMUSIC\n"
         "audio\tMUSIC\n"
         "filesharing\tFILE_SHARING\n"
         "warez\tFILE_SHARING\n"
         "technology\tTECHNOLOGY\n"
         "computers\tTECHNOLOGY\n"
         "government\tGOVERNMENT\n"
         "military\tGOVERNMENT\n"
         "reference\tREFERENCE\n"
         "dictionary\tREFERENCE\n"
         "messaging\tMESSAGING\n"
         "chat\tMESSAGING\n"
         "advertising\tADVERTISING\n"
         "ads\tADVERTISING\n"
         "cdn\tCDN\n"
         "contentdelivery\tCDN\n"
         "portals\tPORTALS\n"
         "portal\tPORTALS\n"
         "forums\tFORUMS\n"
         "forum\tFORUMS\n"
         "blogs\tBLOGS\n"
         "blog\tBLOGS\n"
         "dating\tDATING\n"
         "personals\tDATING\n"
         "religion\tRELIGION\n"
         "jobsearch\tJOB_SEARCH\n"
         "jobs\tJOB_SEARCH\n"
         "realestate\tREAL_ESTATE\n"
         "property\tREAL_ESTATE\n"
         "kids\tKIDS\n"
         "children\tKIDS\n"
         "weather\tWEATHER\n"
         "business\tBUSINESS\n"
         "corporate\tBUSINESS\n";
}

namespace {

constexpr int kDomainsPerCategory = 3;

struct SynthDomain {
  std::string name;
  std::string category;       // canonical
  std::string source_a, source_b;
  int64_t rank = 0;
  double good_site = 0, trust = 0, child_safety = 0;
  bool self_flag = false;  // one security flag set
};

std::string category_slug(const std::string& canonical) {
  std::string s = to_lower(canonical);
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  return s;
}

// a source label that maps to the canonical value, per source
std::pair<std::string, std::string> source_labels_for(const std::string& canonical) {
  std::vector<std::string> matches;
  for (const auto& line : split(default_taxonomy_tsv(), '\n')) {
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    if (parts.size() == 2 && parts[1] == canonical) matches.push_back(parts[0]);
  }
  if (matches.empty()) return {canonical, canonical};
  return {matches.front(), matches.back()};
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) h = (h ^ static_cast<uint8_t>(c)) * 1099511628211ULL;
  return h;
}

struct EffectSet {
  double domain = 0;       // probability shift toward the target category
  double statistical = 0;  // payload size scale
  double dpi = 0;          // password-form probability shift
  double application = 0;  // cookie count shift
  int domain_target_cat = -1;
};

// deterministic target category for a (label, class) pair
int target_category_index(const std::string& label, const std::string& klass, int n_categories) {
  return static_cast<int>(fnv1a(label + "|" + klass) % static_cast<uint64_t>(n_categories));
}

std::vector<uint8_t> to_bytes(const std::string& s) {
  return std::vector<uint8_t>(s.begin(), s.end());
}

std::string filler_text(Rng& rng, size_t n) {
  static const char* words[] = {"lorem", "ipsum", "dolor", "sit",  "amet", "consectetur",
                                "adipiscing", "elit",  "sed",  "do",   "eiusmod", "tempor"};
  std::string out;
  while (out.size() < n) {
    out += words[rng.uniform(12)];
    out += ' ';
  }
  out.resize(n);
  return out;
}

// TLS record framing helpers
void append_record(std::vector<uint8_t>& out, uint8_t type, uint16_t ver,
                   const std::vector<uint8_t>& payload) {
  out.push_back(type);
  out.push_back(static_cast<uint8_t>(ver >> 8));
  out.push_back(static_cast<uint8_t>(ver));
  out.push_back(static_cast<uint8_t>(payload.size() >> 8));
  out.push_back(static_cast<uint8_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());
}

std::vector<uint8_t> handshake_msg(uint8_t type, const std::vector<uint8_t>& body) {
  std::vector<uint8_t> out;
  out.push_back(type);
  out.push_back(static_cast<uint8_t>(body.size() >> 16));
  out.push_back(static_cast<uint8_t>(body.size() >> 8));
  out.push_back(static_cast<uint8_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<uint8_t> client_hello(const std::string& sni, uint16_t version, Rng& rng) {
  std::vector<uint8_t> b;
  b.push_back(static_cast<uint8_t>(version >> 8));
  b.push_back(static_cast<uint8_t>(version));
  for (int i = 0; i < 32; ++i) b.push_back(static_cast<uint8_t>(rng.uniform(256)));
  b.push_back(0);        // session id
  b.push_back(0);
  b.push_back(4);        // two cipher suites
  b.push_back(0xc0); b.push_back(0x2f);
  b.push_back(0x00); b.push_back(0x9c);
  b.push_back(1);        // compression
  b.push_back(0);
  // extensions: server_name only
  std::vector<uint8_t> ext;
  uint16_t host_len = static_cast<uint16_t>(sni.size());
  uint16_t entry_len = static_cast<uint16_t>(3 + host_len);
  uint16_t sn_len = static_cast<uint16_t>(2 + entry_len);
  ext.push_back(0); ext.push_back(0);  // type server_name
  ext.push_back(static_cast<uint8_t>(sn_len >> 8));
  ext.push_back(static_cast<uint8_t>(sn_len));
  ext.push_back(static_cast<uint8_t>(entry_len >> 8));
  ext.push_back(static_cast<uint8_t>(entry_len));
  ext.push_back(0);  // host_name
  ext.push_back(static_cast<uint8_t>(host_len >> 8));
  ext.push_back(static_cast<uint8_t>(host_len));
  ext.insert(ext.end(), sni.begin(), sni.end());
  b.push_back(static_cast<uint8_t>(ext.size() >> 8));
  b.push_back(static_cast<uint8_t>(ext.size()));
  b.insert(b.end(), ext.begin(), ext.end());
  return handshake_msg(1, b);
}

std::vector<uint8_t> server_hello(uint16_t version, Rng& rng) {
  std::vector<uint8_t> b;
  b.push_back(static_cast<uint8_t>(version >> 8));
  b.push_back(static_cast<uint8_t>(version));
  for (int i = 0; i < 32; ++i) b.push_back(static_cast<uint8_t>(rng.uniform(256)));
  b.push_back(0);  // session id
  b.push_back(0xc0); b.push_back(0x2f);
  b.push_back(0);  // compression
  return handshake_msg(2, b);
}

std::vector<uint8_t> certificate_msg(const std::vector<uint8_t>& leaf) {
  std::vector<uint8_t> body;
  uint32_t leaf_len = static_cast<uint32_t>(leaf.size());
  uint32_t total = leaf_len + 3;
  body.push_back(static_cast<uint8_t>(total >> 16));
  body.push_back(static_cast<uint8_t>(total >> 8));
  body.push_back(static_cast<uint8_t>(total));
  body.push_back(static_cast<uint8_t>(leaf_len >> 16));
  body.push_back(static_cast<uint8_t>(leaf_len >> 8));
  body.push_back(static_cast<uint8_t>(leaf_len));
  body.insert(body.end(), leaf.begin(), leaf.end());
  return handshake_msg(11, body);
}

// splits a byte stream into TCP data packets of at most mss bytes
struct TcpStream {
  PcapWriter& pcap;
  IpAddr client, server;
  uint16_t cport, sport;
  int64_t& clock;

  void handshake() {
    pcap.write_tcp(clock, client, cport, server, sport, tcpflag::SYN, {});
    clock += 1000;
    pcap.write_tcp(clock, server, sport, client, cport, tcpflag::SYN | tcpflag::ACK, {});
    clock += 1000;
    pcap.write_tcp(clock, client, cport, server, sport, tcpflag::ACK, {});
    clock += 1000;
  }
  void send(bool from_client, const std::vector<uint8_t>& bytes) {
    constexpr size_t kMss = 1400;
    for (size_t off = 0; off < bytes.size(); off += kMss) {
      size_t len = std::min(kMss, bytes.size() - off);
      std::vector<uint8_t> chunk(bytes.begin() + off, bytes.begin() + off + len);
      if (from_client)
        pcap.write_tcp(clock, client, cport, server, sport, tcpflag::ACK | tcpflag::PSH, chunk);
      else
        pcap.write_tcp(clock, server, sport, client, cport, tcpflag::ACK | tcpflag::PSH, chunk);
      clock += 1000;
    }
  }
  void fin_from_client() {
    pcap.write_tcp(clock, client, cport, server, sport, tcpflag::FIN | tcpflag::ACK, {});
    clock += 1000;
  }
};

}  // namespace

SynthOutput synth_generate(const SynthSpec& spec, const std::string& out_dir) {
  if (spec.n_subjects < 2) throw InvalidSpecError("n_subjects must be >= 2");
  if (spec.sessions_min < 1 || spec.sessions_max < spec.sessions_min)
    throw InvalidSpecError("bad sessions_per_subject range");
  static const std::set<std::string> kFamilies = {"domain", "statistical", "dpi", "application"};
  for (const auto& e : spec.effects) {
    const LabelDef& def = label_def(e.label);  // throws on unknown label
    if (std::find(def.classes.begin(), def.classes.end(), e.klass) == def.classes.end())
      throw InvalidSpecError("effect class '" + e.klass + "' not declared for " + e.label);
    if (!kFamilies.count(e.family)) throw InvalidSpecError("unknown feature family: " + e.family);
    if (e.effect_size < 0 || e.effect_size > 1)
      throw InvalidSpecError("effect size must be in [0,1]");
  }

  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "captures");

  SynthOutput out;
  out.taxonomy_path = (fs::path(out_dir) / "taxonomy.tsv").string();
  write_text_file(out.taxonomy_path, default_taxonomy_tsv());
  Taxonomy taxonomy = Taxonomy::load(out.taxonomy_path);
  const std::vector<std::string>& categories = taxonomy.canonical_categories();
  const int ncat = static_cast<int>(categories.size());

  Rng rng(mix64(spec.seed));

  // ---- domain universe + fixture store ----
  std::vector<SynthDomain> domains;
  json fixtures_map = json::object();
  for (const auto& cat : categories) {
    auto [sa, sb] = source_labels_for(cat);
    for (int j = 0; j < kDomainsPerCategory; ++j) {
      SynthDomain d;
      d.name = category_slug(cat) + std::to_string(j) + ".example";
      d.category = cat;
      d.source_a = sa;
      d.source_b = sb;
      d.rank = 1 + static_cast<int64_t>(rng.uniform(100000));
      d.good_site = 40 + rng.uniform_real() * 60;
      d.trust = 40 + rng.uniform_real() * 60;
      d.child_safety = 40 + rng.uniform_real() * 60;
      d.self_flag = rng.bernoulli(0.05);
      json entry{{"rank", d.rank},
                 {"scores",
                  {{"good_site", d.good_site},
                   {"trustworthiness", d.trust},
                   {"child_safety", d.child_safety}}},
                 {"flags",
                  {{"scam", d.self_flag && j == 0},
                   {"spam", d.self_flag && j == 1},
                   {"malware_or_viruses", d.self_flag && j == 2},
                   {"privacy_risks", false},
                   {"phishing", false}}},
                 {"categories", {{"source_a", d.source_a}, {"source_b", d.source_b}}}};
      fixtures_map[d.name] = std::move(entry);
      domains.push_back(std::move(d));
    }
  }
  out.fixtures_path = (fs::path(out_dir) / "fixtures.json").string();
  write_text_file(out.fixtures_path,
                  json{{"schema_version", 1}, {"domains", fixtures_map}}.dump(2) + "\n");

  // ---- subjects, labels, map ----
  std::vector<std::string> subject_ids;
  for (int i = 0; i < spec.n_subjects; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%03d", i + 1);
    subject_ids.emplace_back(buf);
  }

  // balanced class assignment per label, shuffled deterministically
  std::map<std::string, std::vector<std::string>> assigned;  // label -> per-subject class
  for (const auto& def : label_schema()) {
    std::vector<std::string> v(spec.n_subjects);
    for (int i = 0; i < spec.n_subjects; ++i)
      v[i] = def.classes[static_cast<size_t>(i) % def.classes.size()];
    for (int i = spec.n_subjects - 1; i > 0; --i) {
      int j = static_cast<int>(rng.uniform(static_cast<uint64_t>(i + 1)));
      std::swap(v[i], v[j]);
    }
    assigned[def.name] = std::move(v);
  }

  {
    std::string csv = labels_csv_header() + "\n";
    for (int i = 0; i < spec.n_subjects; ++i) {
      csv += subject_ids[i];
      for (const auto& def : label_schema()) csv += "," + csv_escape(assigned[def.name][i]);
      csv += '\n';
    }
    out.labels_path = (fs::path(out_dir) / "labels.csv").string();
    write_text_file(out.labels_path, csv);
  }

  {
    std::string map_text = "# client_ip<TAB>subject_id\n";
    for (int i = 0; i < spec.n_subjects; ++i) {
      map_text += "10.0." + std::to_string(i / 200) + "." + std::to_string(i % 200 + 1) + "\t" +
                  subject_ids[i] + "\n";
    }
    out.subject_map_path = (fs::path(out_dir) / "subject_map.tsv").string();
    write_text_file(out.subject_map_path, map_text);
  }

  // ---- per-subject traffic ----
  out.sidecar_path = (fs::path(out_dir) / "sidecar.jsonl").string();
  std::ofstream sidecar(out.sidecar_path);
  static const char* kOsPool[] = {"Android 4.4.2", "Android 5.0.1", "Android 6.0"};

  for (int si = 0; si < spec.n_subjects; ++si) {
    const std::string& sid = subject_ids[si];
    Rng srng(substream(spec.seed, 0x100000 + static_cast<uint64_t>(si)));

    EffectSet eff;
    for (const auto& e : spec.effects) {
      if (assigned[e.label][si] != e.klass) continue;
      if (e.family == "domain") {
        eff.domain = std::max(eff.domain, e.effect_size);
        eff.domain_target_cat = target_category_index(e.label, e.klass, ncat);
      } else if (e.family == "statistical") {
        eff.statistical = std::max(eff.statistical, e.effect_size);
      } else if (e.family == "dpi") {
        eff.dpi = std::max(eff.dpi, e.effect_size);
      } else {
        eff.application = std::max(eff.application, e.effect_size);
      }
    }

    IpAddr client = IpAddr::parse("10.0." + std::to_string(si / 200) + "." +
                                  std::to_string(si % 200 + 1));
    std::string capture_path = (fs::path(out_dir) / "captures" / (sid + ".pcap")).string();
    PcapWriter pcap(capture_path);
    out.capture_paths.push_back(capture_path);

    int64_t clock = 1404000000000000 + static_cast<int64_t>(si) * 3600000000ll;  // per-subject hour
    const std::string os_version = kOsPool[srng.uniform(3)];
    int n_sessions =
        spec.sessions_min + static_cast<int>(srng.uniform(
                                static_cast<uint64_t>(spec.sessions_max - spec.sessions_min + 1)));
    uint16_t next_port = 40000;

    for (int sn = 0; sn < n_sessions; ++sn) {
      clock += 1000000 + static_cast<int64_t>(srng.uniform(20000000));  // 1-21 s between sessions

      // pick a domain, honouring a planted domain effect
      int cat_idx;
      double p_target = 1.0 / ncat + (0.85 - 1.0 / ncat) * eff.domain;
      if (eff.domain_target_cat >= 0 && srng.bernoulli(p_target))
        cat_idx = eff.domain_target_cat;
      else
        cat_idx = static_cast<int>(srng.uniform(static_cast<uint64_t>(ncat)));
      const SynthDomain& dom =
          domains[static_cast<size_t>(cat_idx) * kDomainsPerCategory + srng.uniform(kDomainsPerCategory)];
      IpAddr server = IpAddr::v4(0x5db80000u + (mix64(fnv1a(dom.name)) & 0xffff));
      uint16_t cport = next_port++;

      double roll = srng.uniform_real();
      json truth{{"subject", sid}, {"session_index", sn}, {"domain", dom.name},
                 {"category", dom.category}};

      double size_scale = 1.0 + 1.5 * eff.statistical;

      if (roll < 0.5) {
        // ---- HTTP ----
        int cookie_count = static_cast<int>(srng.uniform(3)) +
                           static_cast<int>(std::floor(6.0 * eff.application + 1e-9));
        bool with_form = srng.bernoulli(0.05 + 0.9 * eff.dpi);
        bool as_download = !with_form && srng.bernoulli(0.05);
        bool as_json = !with_form && !as_download && srng.bernoulli(0.25);
        bool gzipped = srng.bernoulli(0.25);

        std::string req = "GET /p" + std::to_string(sn) + " HTTP/1.1\r\n";
        req += "Host: " + dom.name + "\r\n";
        req += "User-Agent: Dalvik/2.1.0 (Linux; U; " + os_version + "; Pixel Build/XQ1A)\r\n";
        if (cookie_count > 0) {
          req += "Cookie: ";
          for (int ci = 0; ci < cookie_count; ++ci) {
            if (ci) req += "; ";
            req += "c" + std::to_string(ci) + "=v" + std::to_string(ci);
          }
          req += "\r\n";
        }
        req += "Accept-Encoding: gzip\r\n\r\n";

        size_t body_target = static_cast<size_t>((200 + srng.uniform(1300)) * size_scale);
        std::string content_type;
        std::string body;
        if (as_json) {
          content_type = "application/json";
          body = "{\"items\": [\"" + filler_text(srng, body_target) + "\"]}";
        } else if (as_download) {
          content_type = "application/pdf";
          body = "%PDF-1.4 " + filler_text(srng, body_target);
        } else {
          content_type = "text/html";
          body = "<html><head><title>" + dom.name + "</title></head><body>";
          if (with_form) {
            body += "<form action=\"/login\" method=\"post\">"
                    "<input type=\"text\" name=\"username\">"
                    "<input type=\"password\" name=\"pass\">"
                    "<input type=\"email\" name=\"email\"></form>";
          }
          body += "<p>" + filler_text(srng, body_target) + "</p></body></html>";
        }

        std::vector<uint8_t> body_bytes = to_bytes(body);
        if (gzipped) body_bytes = gzip_compress(body_bytes);
        std::string resp = "HTTP/1.1 200 OK\r\n";
        resp += "Content-Type: " + content_type + "\r\n";
        if (gzipped) resp += "Content-Encoding: gzip\r\n";
        if (as_download)
          resp += "Content-Disposition: attachment; filename=d" + std::to_string(sn) + ".pdf\r\n";
        resp += "Content-Length: " + std::to_string(body_bytes.size()) + "\r\n\r\n";
        std::vector<uint8_t> resp_bytes = to_bytes(resp);
        resp_bytes.insert(resp_bytes.end(), body_bytes.begin(), body_bytes.end());

        TcpStream st{pcap, client, server, cport, 80, clock};
        st.handshake();
        st.send(true, to_bytes(req));
        st.send(false, resp_bytes);
        st.fin_from_client();

        truth["kind"] = "http";
        truth["server_port"] = 80;
        truth["host"] = dom.name;
        truth["cookie_count"] = cookie_count;
        truth["form_count"] = with_form ? 1 : 0;
        truth["has_password_field"] = with_form;
        truth["content_type"] = content_type;
        truth["os_version"] = os_version;
        truth["download_count"] = as_download ? 1 : 0;
        truth["gzipped"] = gzipped;
      } else if (roll < 0.8) {
        // ---- TLS ----
        double vroll = srng.uniform_real();
        uint16_t version = vroll < 0.8 ? 0x0303 : (vroll < 0.95 ? 0x0301 : 0x0302);
        bool self_signed = srng.bernoulli(0.08);
        bool expired = srng.bernoulli(0.05);
        int64_t not_before = clock - 365ll * 86400 * 1000000;
        int64_t not_after = expired ? clock - 86400ll * 1000000 : clock + 365ll * 86400 * 1000000;
        auto leaf = build_test_certificate(self_signed ? dom.name : "Example Trust CA", dom.name,
                                           not_before, not_after);

        std::vector<uint8_t> c1;
        append_record(c1, 0x16, 0x0301, client_hello(dom.name, version, srng));
        std::vector<uint8_t> s1;
        {
          std::vector<uint8_t> hs = server_hello(version, srng);
          auto cert = certificate_msg(leaf);
          hs.insert(hs.end(), cert.begin(), cert.end());
          auto done = handshake_msg(14, {});
          hs.insert(hs.end(), done.begin(), done.end());
          append_record(s1, 0x16, version, hs);
        }
        size_t up = static_cast<size_t>((100 + srng.uniform(400)) * size_scale);
        size_t down = static_cast<size_t>((400 + srng.uniform(2000)) * size_scale);
        std::vector<uint8_t> capp, sapp;
        {
          std::vector<uint8_t> blob(up);
          for (auto& b : blob) b = static_cast<uint8_t>(srng.uniform(256));
          append_record(capp, 0x17, version, blob);
          blob.resize(down);
          for (auto& b : blob) b = static_cast<uint8_t>(srng.uniform(256));
          append_record(sapp, 0x17, version, blob);
        }

        TcpStream st{pcap, client, server, cport, 443, clock};
        st.handshake();
        st.send(true, c1);
        st.send(false, s1);
        st.send(true, capp);
        st.send(false, sapp);
        st.fin_from_client();

        truth["kind"] = "tls";
        truth["server_port"] = 443;
        truth["sni"] = dom.name;
        truth["tls_version"] = version == 0x0303 ? "TLS1_2" : (version == 0x0301 ? "TLS1_0" : "TLS1_1");
        truth["cert_self_signed"] = self_signed;
        truth["cert_expired"] = expired;
      } else if (roll < 0.9) {
        // ---- Play-store-ish TCP 5228 traffic: opaque keepalive ----
        size_t up = static_cast<size_t>((50 + srng.uniform(200)) * size_scale);
        size_t down = static_cast<size_t>((50 + srng.uniform(300)) * size_scale);
        std::vector<uint8_t> u(up), d(down);
        for (auto& b : u) b = static_cast<uint8_t>(srng.uniform(256));
        for (auto& b : d) b = static_cast<uint8_t>(srng.uniform(256));
        TcpStream st{pcap, client, server, cport, 5228, clock};
        st.handshake();
        st.send(true, u);
        st.send(false, d);
        st.fin_from_client();
        truth["kind"] = "tcp5228";
        truth["server_port"] = 5228;
      } else {
        // ---- UDP (DNS-shaped) ----
        size_t qn = 20 + srng.uniform(40);
        std::vector<uint8_t> q(qn), a;
        for (auto& b : q) b = static_cast<uint8_t>(srng.uniform(256));
        bool answered = !srng.bernoulli(0.1);
        pcap.write_udp(clock, client, cport, server, 53, q);
        clock += 20000;
        if (answered) {
          a.resize(40 + srng.uniform(160));
          for (auto& b : a) b = static_cast<uint8_t>(srng.uniform(256));
          pcap.write_udp(clock, server, 53, client, cport, a);
          clock += 20000;
        }
        truth["kind"] = "udp";
        truth["server_port"] = 53;
        truth["answered"] = answered;
      }
      sidecar << truth.dump() << "\n";
    }
    pcap.close();
  }

  return out;
}

}  // namespace netprof
