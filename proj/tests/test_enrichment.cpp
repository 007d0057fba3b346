#include "doctest.h"

#include <filesystem>
#include <thread>

#include "netprof/domain_enrichment.hpp"
#include "netprof/synth.hpp"
#include "netprof/util.hpp"

using namespace netprof;

namespace {

Taxonomy test_taxonomy() {
  return Taxonomy::from_pairs({{"news", "NEWS"},
                               {"press", "NEWS"},
                               {"socialnetworking", "SOCIAL_NETWORK"},
                               {"webmail", "EMAIL"},
                               {"email", "EMAIL"},
                               {"search", "SEARCH"}});
}

class CountingProvider : public DomainProvider {
 public:
  explicit CountingProvider(FixtureProvider inner) : inner_(std::move(inner)) {}
  std::optional<ProviderRecord> lookup(const std::string& domain) override {
    calls_++;
    return inner_.lookup(domain);
  }
  int calls() const { return calls_; }

 private:
  FixtureProvider inner_;
  std::atomic<int> calls_{0};
};

FixtureProvider news_fixture() {
  FixtureProvider p;
  ProviderRecord r;
  r.rank = 1200;
  r.score_trustworthiness = 92;
  r.category_a = "news";
  r.category_b = "news";
  p.add("example-news.com", r);
  return p;
}

}  // namespace

TEST_CASE("fixture entry echoes through the mapping") {
  auto provider = news_fixture();
  Taxonomy tax = test_taxonomy();
  Enricher e(provider, tax);
  DomainInfo info = e.enrich("example-news.com");
  CHECK(info.popularity_rank == 1200);
  CHECK(info.score_trustworthiness == 92);
  CHECK(info.general_category == "NEWS");
  CHECK(!info.score_good_site.has_value());
  CHECK(!info.flag_scam);
}

TEST_CASE("unknown domain degrades to empty info") {
  auto provider = news_fixture();
  Taxonomy tax = test_taxonomy();
  Enricher e(provider, tax);
  DomainInfo info = e.enrich("nowhere.example");
  CHECK(!info.popularity_rank.has_value());
  CHECK(info.general_category == "UNKNOWN");
}

TEST_CASE("subdomains reduce to the registrable domain") {
  auto provider = news_fixture();
  Taxonomy tax = test_taxonomy();
  Enricher e(provider, tax);
  DomainInfo info = e.enrich("m.example-news.com");
  CHECK(info.popularity_rank == 1200);
  CHECK(info.general_category == "NEWS");
}

TEST_CASE("registrable domain reduction against a small oracle") {
  // oracle pairs picked from the public suffix rules
  CHECK(registrable_domain("example.com") == "example.com");
  CHECK(registrable_domain("m.example-news.com") == "example-news.com");
  CHECK(registrable_domain("a.b.c.example.org") == "example.org");
  CHECK(registrable_domain("shop.example.co.uk") == "example.co.uk");
  CHECK(registrable_domain("example.co.uk") == "example.co.uk");
  CHECK(registrable_domain("www.gov.uk.example.net") == "example.net");
  CHECK(registrable_domain("WWW.Example.COM.") == "example.com");
  CHECK(registrable_domain("localhost") == "localhost");
  CHECK(registrable_domain("news0.example") == "news0.example");
}

TEST_CASE("combine categories") {
  Taxonomy tax = test_taxonomy();
  CHECK(combine_categories(std::string("socialnetworking"), std::nullopt, tax) ==
        "SOCIAL_NETWORK");
  CHECK(combine_categories(std::string("news"), std::string("news"), tax) == "NEWS");
  CHECK(combine_categories(std::string("webmail"), std::string("email"), tax) == "EMAIL");
  // conflict: first source wins
  CHECK(combine_categories(std::string("news"), std::string("search"), tax) == "NEWS");
  CHECK(combine_categories(std::nullopt, std::string("press"), tax) == "NEWS");
  CHECK(combine_categories(std::nullopt, std::nullopt, tax) == "UNKNOWN");

  int unknowns = 0;
  CHECK(combine_categories(std::string("nonsense"), std::nullopt, tax, false, &unknowns) ==
        "UNKNOWN");
  CHECK(unknowns == 1);
  CHECK_THROWS_AS(combine_categories(std::string("nonsense"), std::nullopt, tax, true),
                  UnknownSourceCategoryError);
}

TEST_CASE("taxonomy closure over the shipped table") {
  std::string path = (std::filesystem::temp_directory_path() / "np_tax.tsv").string();
  write_text_file(path, default_taxonomy_tsv());
  Taxonomy tax = Taxonomy::load(path);
  CHECK(tax.canonical_categories().size() == 32);
  // every source label maps to a declared canonical value
  for (const auto& line : split(default_taxonomy_tsv(), '\n')) {
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    auto mapped = tax.map_source(parts[0]);
    REQUIRE(mapped.has_value());
    const auto& canon = tax.canonical_categories();
    CHECK(std::find(canon.begin(), canon.end(), *mapped) != canon.end());
  }
}

TEST_CASE("cache stops repeat provider calls, also under concurrency") {
  CountingProvider provider(news_fixture());
  Taxonomy tax = test_taxonomy();
  Enricher e(provider, tax);

  DomainInfo cold = e.enrich("example-news.com");
  DomainInfo warm = e.enrich("example-news.com");
  CHECK(provider.calls() == 1);
  CHECK(cold.popularity_rank == warm.popularity_rank);
  CHECK(cold.general_category == warm.general_category);

  // concurrent misses on one fresh domain still make one call
  CountingProvider p2(news_fixture());
  Enricher e2(p2, tax);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([&] { e2.enrich("sub.example-news.com"); });
  for (auto& t : threads) t.join();
  CHECK(p2.calls() == 1);
}

TEST_CASE("strict mode propagates provider failures") {
  class FailingProvider : public DomainProvider {
   public:
    std::optional<ProviderRecord> lookup(const std::string&) override {
      throw ProviderUnavailableError("backend down");
    }
  };
  FailingProvider provider;
  Taxonomy tax = test_taxonomy();

  Enricher relaxed(provider, tax, false);
  DomainInfo info = relaxed.enrich("x.example");
  CHECK(info.general_category == "UNKNOWN");
  CHECK(relaxed.degraded_lookups() == 1);

  Enricher strict(provider, tax, true);
  CHECK_THROWS_AS(strict.enrich("y.example"), ProviderUnavailableError);
}

TEST_CASE("fixture store file loads") {
  std::string path = (std::filesystem::temp_directory_path() / "np_fixtures.json").string();
  write_text_file(path, R"({"schema_version": 1, "domains": {
    "example-news.com": {"rank": 7, "scores": {"good_site": 55},
                          "flags": {"phishing": true},
                          "categories": {"source_a": "news"}}}})");
  FixtureProvider p = FixtureProvider::load(path);
  auto rec = p.lookup("example-news.com");
  REQUIRE(rec.has_value());
  CHECK(rec->rank == 7);
  CHECK(rec->score_good_site == 55);
  CHECK(rec->flag_phishing);
  CHECK(rec->category_a == "news");
  CHECK(!p.lookup("other.example").has_value());
}
