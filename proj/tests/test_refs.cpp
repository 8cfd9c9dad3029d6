#include <gtest/gtest.h>

#include <sstream>

#include "cvsstext/refs.hpp"
#include "cvsstext/url.hpp"

using namespace cvsstext;
using namespace cvsstext::refs;

namespace {

nvd::VulnEntry entry(std::string id, std::vector<std::string> urls, int year = 2021) {
  nvd::VulnEntry e;
  e.cve_id = std::move(id);
  e.published = nvd::Date{year, 1, 1};
  for (auto& u : urls) e.references.push_back({std::move(u), {}});
  return e;
}

const Taxonomy& taxonomy() {
  static const Taxonomy t = Taxonomy::load(std::string(CVSSTEXT_CONFIG) + "/taxonomy.json");
  return t;
}

}  // namespace

TEST(ExtractDomain, Examples) {
  EXPECT_EQ(extract_domain("https://lists.apache.org/thread/xyz"), "lists.apache.org");
  EXPECT_EQ(extract_domain("HTTP://GitHub.com:443/a/b"), "github.com");
  EXPECT_THROW(extract_domain("www.securityfocus.com/bid/1"), InvalidUrl);
}

TEST(RankDomains, CountsAndTies) {
  const std::vector<nvd::VulnEntry> e1{
      entry("CVE-2021-0001", {"https://a.com/1", "https://a.com/2", "https://b.com/1"}),
      entry("CVE-2021-0002", {"https://a.com/3"})};
  const auto r = rank_domains(e1, 2);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].domain, "a.com");
  EXPECT_EQ(r[0].count, 3u);
  EXPECT_EQ(r[1].domain, "b.com");
  EXPECT_EQ(r[1].count, 1u);

  const std::vector<nvd::VulnEntry> e2{
      entry("CVE-2021-0001", {"https://b.com/1", "https://a.com/1"}),
      entry("CVE-2021-0002", {"https://b.com/2", "https://a.com/2"})};
  const auto t = rank_domains(e2, 5);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].domain, "a.com");
  EXPECT_EQ(t[1].domain, "b.com");
}

TEST(RankDomains, ParallelCountingMatchesSerial) {
  std::vector<nvd::VulnEntry> entries;
  for (int k = 0; k < 45000; ++k) {
    entries.push_back(entry("CVE-2020-" + std::to_string(10000 + k),
                            {"https://h" + std::to_string(k % 37) + ".example/x",
                             "https://h" + std::to_string(k % 5) + ".example/y"}));
  }
  DomainCounts serial;
  for (const auto& e : entries) {
    for (const auto& r : e.references) serial.add(extract_domain(r.url));
  }
  const auto parallel = count_domains(entries);
  EXPECT_EQ(parallel.counts(), serial.counts());
  EXPECT_EQ(parallel.total(), 90000u);
}

TEST(Taxonomy, PublishedRows) {
  EXPECT_EQ(classify_domain("github.com", taxonomy()), (GroupSet{1}));
  EXPECT_EQ(classify_domain("access.redhat.com", taxonomy()), (GroupSet{3, 4}));
  EXPECT_FALSE(classify_domain("example.invalid", taxonomy()).has_value());
  ASSERT_EQ(taxonomy().groups.size(), 6u);
  for (const auto& [name, e] : taxonomy().domains) EXPECT_FALSE(e.groups.empty()) << name;
}

TEST(Taxonomy, SelectedScrapeDomainsAreClassified) {
  for (const char* d : {"tools.cisco.com", "www.ibm.com", "www.zerodayinitiative.com",
                        "talosintelligence.com", "www.qualcomm.com", "support.f5.com",
                        "wpscan.com", "www.intel.com", "security.snyk.io"}) {
    EXPECT_TRUE(classify_domain(d, taxonomy()).has_value()) << d;
  }
}

TEST(Taxonomy, RejectsInvalidConfig) {
  nlohmann::json j = nlohmann::json::parse(R"({
    "version": 1,
    "groups": [{"id": 1, "name": "VcsBugTracker", "origin": "User",
                "unique": 3, "uniform": 3, "abstract_text": 9}],
    "domains": []})");
  EXPECT_THROW(Taxonomy::from_json(j), ConfigError);
  j["groups"][0]["abstract_text"] = 2;
  j["domains"] = nlohmann::json::parse(R"([{"domain": "x.org", "groups": [7]}])");
  EXPECT_THROW(Taxonomy::from_json(j), ConfigError);
  j["domains"] = nlohmann::json::parse(R"([{"domain": "x.org", "groups": []}])");
  EXPECT_THROW(Taxonomy::from_json(j), ConfigError);
}

TEST(ReferenceStats, SmallExample) {
  const std::vector<nvd::VulnEntry> e{
      entry("CVE-2021-0001", {"https://a.com/1"}),
      entry("CVE-2021-0002", {"https://a.com/2", "https://b.com/1"}),
      entry("CVE-2021-0003", {"https://a.com/3", "https://b.com/2", "https://b.com/3"})};
  const auto s = reference_stats(e);
  EXPECT_EQ(s.total_refs, 6u);
  EXPECT_EQ(s.per_cve_median, 2u);
  EXPECT_EQ(s.distinct_domains, 2u);
  EXPECT_DOUBLE_EQ(s.top50_share, 1.0);
}

TEST(ReferenceStats, ZeroReferences) {
  const auto s = reference_stats({entry("CVE-2021-0001", {})});
  EXPECT_EQ(s.total_refs, 0u);
  EXPECT_EQ(s.per_cve_median, 0u);
  EXPECT_DOUBLE_EQ(s.top50_share, 0.0);
}

TEST(ReferenceStats, ByYearAndTwitter) {
  const std::vector<nvd::VulnEntry> e{
      entry("CVE-2016-0001", {"https://twitter.com/someone"}, 2016),
      entry("CVE-2021-0002", {"https://twitter.com/someone/status/123", "https://a.com/"}, 2021)};
  const auto s = reference_stats(e);
  EXPECT_EQ(s.twitter_profile_links, 1u);
  EXPECT_EQ(s.twitter_status_links, 1u);
  const auto by_year = reference_stats_by_year(e);
  ASSERT_EQ(by_year.size(), 2u);
  EXPECT_EQ(by_year.at(2016).total_refs, 1u);
  EXPECT_EQ(by_year.at(2021).total_refs, 2u);
  EXPECT_EQ(tag_social_link("https://example.com"), SocialLink::None);
}

TEST(Ranking, PrintsGroupsAndRatings) {
  const std::vector<nvd::VulnEntry> e{entry("CVE-2021-0001", {"https://github.com/x", "https://nowhere.example/"})};
  const auto r = rank_domains(e, 10, &taxonomy());
  std::ostringstream out;
  print_ranking(out, r, &taxonomy());
  EXPECT_NE(out.str().find("github.com"), std::string::npos);
  EXPECT_NE(out.str().find("nowhere.example"), std::string::npos);
}
