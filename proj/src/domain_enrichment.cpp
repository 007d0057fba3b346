#include "netprof/domain_enrichment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include "netprof/util.hpp"

#include "json.hpp"

namespace netprof {

using nlohmann::json;

// ---------------------------------------------------------------------------
// fixture provider

namespace {

ProviderRecord record_from_json(const json& j) {
  ProviderRecord r;
  if (j.contains("rank") && j["rank"].is_number()) r.rank = j["rank"].get<int64_t>();
  if (j.contains("scores") && j["scores"].is_object()) {
    const json& s = j["scores"];
    if (s.contains("good_site")) r.score_good_site = s["good_site"].get<double>();
    if (s.contains("trustworthiness")) r.score_trustworthiness = s["trustworthiness"].get<double>();
    if (s.contains("child_safety")) r.score_child_safety = s["child_safety"].get<double>();
  }
  if (j.contains("flags") && j["flags"].is_object()) {
    const json& f = j["flags"];
    r.flag_scam = f.value("scam", false);
    r.flag_spam = f.value("spam", false);
    r.flag_malware_or_viruses = f.value("malware_or_viruses", false);
    r.flag_privacy_risks = f.value("privacy_risks", false);
    r.flag_phishing = f.value("phishing", false);
  }
  if (j.contains("categories") && j["categories"].is_object()) {
    const json& c = j["categories"];
    if (c.contains("source_a") && c["source_a"].is_string())
      r.category_a = c["source_a"].get<std::string>();
    if (c.contains("source_b") && c["source_b"].is_string())
      r.category_b = c["source_b"].get<std::string>();
  }
  return r;
}

}  // namespace

FixtureProvider FixtureProvider::load(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw ProviderUnavailableError("fixture store unreadable: " + path + ": " + e.what());
  }
  const json& map = doc.contains("domains") ? doc["domains"] : doc;
  if (!map.is_object()) throw ProviderUnavailableError("fixture store is not a JSON map: " + path);
  FixtureProvider p;
  for (auto it = map.begin(); it != map.end(); ++it) {
    if (it.key() == "schema_version") continue;
    p.records_[to_lower(it.key())] = record_from_json(it.value());
  }
  return p;
}

std::optional<ProviderRecord> FixtureProvider::lookup(const std::string& registrable_domain) {
  auto it = records_.find(registrable_domain);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// taxonomy

Taxonomy Taxonomy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open taxonomy: " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("taxonomy line " + std::to_string(lineno) +
                               ": expected source_label<TAB>canonical_category");
    pairs.emplace_back(trim(t.substr(0, tab)), trim(t.substr(tab + 1)));
  }
  return from_pairs(pairs);
}

Taxonomy Taxonomy::from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
  Taxonomy t;
  std::set<std::string> canon;
  for (const auto& [src, dst] : pairs) {
    t.source_to_canon_[to_lower(src)] = dst;
    canon.insert(dst);
  }
  t.canon_.assign(canon.begin(), canon.end());
  return t;
}

std::optional<std::string> Taxonomy::map_source(const std::string& source_label) const {
  auto it = source_to_canon_.find(to_lower(source_label));
  if (it == source_to_canon_.end()) return std::nullopt;
  return it->second;
}

std::string Taxonomy::serialize() const {
  std::ostringstream out;
  for (const auto& [src, dst] : source_to_canon_) out << src << '\t' << dst << '\n';
  return out.str();
}

std::string combine_categories(const std::optional<std::string>& cat_a,
                               const std::optional<std::string>& cat_b, const Taxonomy& taxonomy,
                               bool strict, int* unknown_labels) {
  auto resolve = [&](const std::optional<std::string>& c) -> std::optional<std::string> {
    if (!c) return std::nullopt;
    auto mapped = taxonomy.map_source(*c);
    if (!mapped) {
      if (strict) throw UnknownSourceCategoryError("taxonomy lacks source label: " + *c);
      if (unknown_labels) ++*unknown_labels;
      return std::nullopt;
    }
    return mapped;
  };
  auto a = resolve(cat_a);
  auto b = resolve(cat_b);
  if (a) return *a;  // first source wins on conflict
  if (b) return *b;
  return "UNKNOWN";
}

// ---------------------------------------------------------------------------
// registrable domain

namespace {

// multi-label public suffixes the desk-scale reducer knows about;
// single-label TLDs need no listing
const std::set<std::string>& multi_label_suffixes() {
  static const std::set<std::string> s = {
      "co.uk",  "org.uk", "ac.uk",  "gov.uk", "me.uk",  "net.uk", "co.il",  "org.il",
      "ac.il",  "gov.il", "muni.il", "com.au", "net.au", "org.au", "edu.au", "gov.au",
      "co.jp",  "ne.jp",  "or.jp",  "ac.jp",  "go.jp",  "com.br", "net.br", "org.br",
      "gov.br", "com.cn", "net.cn", "org.cn", "gov.cn", "co.in",  "net.in", "org.in",
      "co.nz",  "net.nz", "org.nz", "co.za",  "com.mx", "com.ar", "com.tr", "com.sg",
      "com.hk", "com.tw", "co.kr",  "or.kr",
  };
  return s;
}

}  // namespace

std::string registrable_domain(const std::string& hostname) {
  std::string h = to_lower(trim(hostname));
  while (!h.empty() && h.back() == '.') h.pop_back();
  auto labels = split(h, '.');
  if (labels.size() <= 2) return h;
  std::string last2 = labels[labels.size() - 2] + "." + labels.back();
  size_t keep = multi_label_suffixes().count(last2) ? 3 : 2;
  if (labels.size() <= keep) return h;
  std::string out;
  for (size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// enricher

Enricher::Enricher(DomainProvider& provider, const Taxonomy& taxonomy, bool strict,
                   std::string cache_log_path)
    : provider_(provider), taxonomy_(taxonomy), strict_(strict),
      cache_log_path_(std::move(cache_log_path)) {}

DomainInfo Enricher::lookup_uncached(const std::string& key) {
  std::optional<ProviderRecord> rec;
  try {
    provider_calls_++;
    rec = provider_.lookup(key);
  } catch (const ProviderUnavailableError&) {
    if (strict_) throw;
    degraded_++;
    rec = std::nullopt;
  }
  DomainInfo info;
  if (rec) {
    info.popularity_rank = rec->rank;
    info.score_good_site = rec->score_good_site;
    info.score_trustworthiness = rec->score_trustworthiness;
    info.score_child_safety = rec->score_child_safety;
    info.flag_scam = rec->flag_scam;
    info.flag_spam = rec->flag_spam;
    info.flag_malware_or_viruses = rec->flag_malware_or_viruses;
    info.flag_privacy_risks = rec->flag_privacy_risks;
    info.flag_phishing = rec->flag_phishing;
    int unknown = 0;
    info.general_category =
        combine_categories(rec->category_a, rec->category_b, taxonomy_, strict_, &unknown);
    unknown_labels_ += static_cast<uint64_t>(unknown);
  }
  if (!cache_log_path_.empty()) {
    json j{{"domain", key},
           {"category", info.general_category},
           {"rank", info.popularity_rank ? json(*info.popularity_rank) : json(nullptr)}};
    std::ofstream out(cache_log_path_, std::ios::app);
    out << j.dump() << '\n';
  }
  return info;
}

DomainInfo Enricher::enrich(const std::string& domain) {
  std::string key = registrable_domain(domain);
  std::shared_future<DomainInfo> fut;
  std::promise<DomainInfo> prom;
  bool owner = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      fut = prom.get_future().share();
      cache_.emplace(key, fut);
      owner = true;
    } else {
      fut = it->second;
    }
  }
  if (owner) {
    try {
      prom.set_value(lookup_uncached(key));
    } catch (...) {
      prom.set_exception(std::current_exception());
    }
  }
  return fut.get();
}

}  // namespace netprof
