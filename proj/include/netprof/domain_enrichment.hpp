#pragma once

#include <atomic>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace netprof {

struct ProviderUnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownSourceCategoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raw per-domain answers as the external databases would give them:
// a popularity source, a security-score source and two category
// sources.
struct ProviderRecord {
  std::optional<int64_t> rank;
  std::optional<double> score_good_site;
  std::optional<double> score_trustworthiness;
  std::optional<double> score_child_safety;
  bool flag_scam = false;
  bool flag_spam = false;
  bool flag_malware_or_viruses = false;
  bool flag_privacy_risks = false;
  bool flag_phishing = false;
  std::optional<std::string> category_a;
  std::optional<std::string> category_b;
};

class DomainProvider {
 public:
  virtual ~DomainProvider() = default;
  // keyed on the registrable domain; nullopt when unlisted
  virtual std::optional<ProviderRecord> lookup(const std::string& registrable_domain) = 0;
};

// Offline provider backed by a JSON map file.
class FixtureProvider : public DomainProvider {
 public:
  static FixtureProvider load(const std::string& path);
  std::optional<ProviderRecord> lookup(const std::string& registrable_domain) override;
  void add(const std::string& domain, ProviderRecord rec) { records_[domain] = std::move(rec); }
  size_t size() const { return records_.size(); }

 private:
  std::unordered_map<std::string, ProviderRecord> records_;
};

// source_label<TAB>canonical_category table; the canonical set is the
// artifact's declared category list.
class Taxonomy {
 public:
  static Taxonomy load(const std::string& path);
  static Taxonomy from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

  std::optional<std::string> map_source(const std::string& source_label) const;
  const std::vector<std::string>& canonical_categories() const { return canon_; }  // sorted
  std::string serialize() const;

 private:
  std::map<std::string, std::string> source_to_canon_;
  std::vector<std::string> canon_;
};

// Agreement keeps the value, one source maps alone, conflicts resolve
// to the first source, nothing maps to UNKNOWN. Unmapped source labels
// throw in strict mode and count as diagnostics otherwise.
std::string combine_categories(const std::optional<std::string>& cat_a,
                               const std::optional<std::string>& cat_b, const Taxonomy& taxonomy,
                               bool strict = false, int* unknown_labels = nullptr);

struct DomainInfo {
  std::optional<int64_t> popularity_rank;
  std::optional<double> score_good_site;
  std::optional<double> score_trustworthiness;
  std::optional<double> score_child_safety;
  bool flag_scam = false;
  bool flag_spam = false;
  bool flag_malware_or_viruses = false;
  bool flag_privacy_risks = false;
  bool flag_phishing = false;
  std::string general_category = "UNKNOWN";
};

// public-suffix+1 reduction with a built-in suffix table
std::string registrable_domain(const std::string& hostname);

// Caching front end. At most one provider call per domain, also under
// concurrent misses; optional append-only JSON-lines cache log.
class Enricher {
 public:
  Enricher(DomainProvider& provider, const Taxonomy& taxonomy, bool strict = false,
           std::string cache_log_path = "");

  DomainInfo enrich(const std::string& domain);

  uint64_t provider_calls() const { return provider_calls_; }
  uint64_t degraded_lookups() const { return degraded_; }
  uint64_t unknown_source_labels() const { return unknown_labels_; }

 private:
  DomainInfo lookup_uncached(const std::string& key);

  DomainProvider& provider_;
  const Taxonomy& taxonomy_;
  bool strict_;
  std::string cache_log_path_;
  std::mutex mu_;
  std::unordered_map<std::string, std::shared_future<DomainInfo>> cache_;
  std::atomic<uint64_t> provider_calls_{0};
  std::atomic<uint64_t> degraded_{0};
  std::atomic<uint64_t> unknown_labels_{0};
};

}  // namespace netprof
