#include <gtest/gtest.h>

#include <fstream>

#include "cvsstext/extractor.hpp"
#include "cvsstext/page_source.hpp"
#include "cvsstext/text.hpp"

using namespace cvsstext;
using namespace cvsstext::scrape;

namespace {

const std::string kScrape = std::string(CVSSTEXT_FIXTURES) + "/scrape";

const ExtractorRegistry& registry() {
  static const ExtractorRegistry r =
      ExtractorRegistry::load_dir(std::string(CVSSTEXT_CONFIG) + "/extractors");
  return r;
}

struct GoldenCase {
  std::string extractor, cve_id, url, text, anchor, miss;
};

std::vector<GoldenCase> golden_cases() {
  std::ifstream in(kScrape + "/golden.json");
  const auto j = nlohmann::json::parse(in);
  std::vector<GoldenCase> out;
  for (const auto& c : j.at("cases")) {
    out.push_back({c.at("extractor"), c.at("cve_id"), c.at("url"), c.value("text", ""),
                   c.value("anchor", ""), c.value("miss", "")});
  }
  return out;
}

std::string page(const std::string& url) {
  SimulatedClock clock;
  FixtureSource src(kScrape, clock);
  const auto r = src.fetch(url, Seconds(1000));
  EXPECT_EQ(r.status, 200) << url;
  return r.body;
}

bool contains_ci(const std::string& hay, const std::string& needle) {
  return text::to_lower_ascii(hay).find(text::to_lower_ascii(needle)) != std::string::npos;
}

}  // namespace

TEST(ExtractorRegistry, NineShippedSites) {
  EXPECT_EQ(registry().ids(), (std::vector<std::string>{"cisco", "f5", "ibm", "intel", "qualcomm",
                                                        "snyk", "talos", "wpscan", "zdi"}));
  EXPECT_EQ(registry().for_host("tools.cisco.com")->spec().id, "cisco");
  EXPECT_EQ(registry().resolve("qualcomm.com")->spec().id, "qualcomm");
  EXPECT_EQ(registry().resolve("www.intel.com")->spec().render, RenderMode::Http);
  EXPECT_EQ(registry().resolve("talos")->spec().render, RenderMode::Http);
  EXPECT_EQ(registry().resolve("snyk")->spec().render, RenderMode::Browser);
  EXPECT_EQ(registry().resolve("nope.example"), nullptr);
}

TEST(ExtractorRegistry, RejectsBadConfigs) {
  EXPECT_THROW(ExtractorSpec::from_json(nlohmann::json::parse(R"({"id": "x"})")),
               ExtractorConfigError);
  EXPECT_THROW(ExtractorSpec::from_json(
                   nlohmann::json::parse(R"({"id": "x", "hosts": ["a"], "mode": "magic"})")),
               ExtractorConfigError);
  EXPECT_THROW(Extractor(ExtractorSpec::from_json(
                   nlohmann::json::parse(R"({"id": "x", "hosts": ["a"], "text": ["div >"]})"))),
               ExtractorConfigError);
  ExtractorRegistry r;
  r.add(ExtractorSpec::from_json(nlohmann::json::parse(R"({"id": "x", "hosts": ["a"]})")));
  EXPECT_THROW(
      r.add(ExtractorSpec::from_json(nlohmann::json::parse(R"({"id": "y", "hosts": ["a"]})"))),
      ExtractorConfigError);
}

TEST(ExtractorGolden, EveryCase) {
  const auto cases = golden_cases();
  ASSERT_GE(cases.size(), 9u);
  std::set<std::string> covered;
  for (const auto& c : cases) {
    SCOPED_TRACE(c.extractor + " " + c.cve_id);
    const auto* ex = registry().by_id(c.extractor);
    ASSERT_NE(ex, nullptr);
    const std::string body = page(c.url);
    const auto r = ex->extract(body, c.cve_id);
    if (!c.miss.empty()) {
      ASSERT_TRUE(std::holds_alternative<ExtractMiss>(r));
      EXPECT_EQ(to_string(std::get<ExtractMiss>(r).reason), c.miss);
      continue;
    }
    ASSERT_TRUE(std::holds_alternative<Extraction>(r))
        << std::get<ExtractMiss>(r).detail;
    const auto& got = std::get<Extraction>(r);
    EXPECT_EQ(got.text, c.text);
    EXPECT_EQ(got.anchor, c.anchor);
    EXPECT_NE(got.anchor.find(c.cve_id), std::string::npos);
    EXPECT_GE(text::scalar_count(got.text), ex->spec().min_length);
    for (const auto& d : ex->spec().denylist) EXPECT_FALSE(contains_ci(got.text, d)) << d;
    EXPECT_FALSE(mentions_cvss_vector(got.text));
    covered.insert(c.extractor);
  }
  EXPECT_EQ(covered.size(), 9u);
}

TEST(ExtractorGolden, CiscoLegalFooterIsPresentOnPageButNotInText) {
  const std::string url =
      "https://tools.cisco.com/security/center/content/CiscoSecurityAdvisory/"
      "cisco-sa-rv-cmdinject-9mDfQ2Ln";
  const std::string body = page(url);
  ASSERT_NE(body.find("AS IS"), std::string::npos);
  ASSERT_NE(body.find("Cisco and/or its affiliates"), std::string::npos);
  const auto r = registry().by_id("cisco")->extract(body, "CVE-2021-1148");
  ASSERT_TRUE(std::holds_alternative<Extraction>(r));
  const auto& t = std::get<Extraction>(r).text;
  EXPECT_NE(t.find("inject arbitrary commands"), std::string::npos);
  EXPECT_EQ(t.find("WARRANTY"), std::string::npos);
  EXPECT_EQ(t.find("Privacy"), std::string::npos);
}

TEST(ExtractorGolden, MultiCvePagesAreSplitNotMerged) {
  const auto* intel = registry().by_id("intel");
  const std::string body =
      page("https://www.intel.com/content/www/us/en/security-center/advisory/intel-sa-00442.html");
  const auto a = intel->extract(body, "CVE-2021-0123");
  const auto b = intel->extract(body, "CVE-2021-0124");
  ASSERT_TRUE(std::holds_alternative<Extraction>(a));
  ASSERT_TRUE(std::holds_alternative<Extraction>(b));
  EXPECT_NE(std::get<Extraction>(a).text, std::get<Extraction>(b).text);
  EXPECT_EQ(std::get<Extraction>(a).text.find("denial of service"), std::string::npos);
  const auto none = intel->extract(body, "CVE-2021-0999");
  ASSERT_TRUE(std::holds_alternative<ExtractMiss>(none));
  EXPECT_EQ(std::get<ExtractMiss>(none).reason, MissReason::CveNotFound);
}

TEST(ExtractorModes, SectionMode) {
  ExtractorSpec s;
  s.id = "t";
  s.hosts = {"t.example"};
  s.mode = ExtractMode::Section;
  s.section = "div.entry";
  s.section_cve = "h4";
  s.text = {"p"};
  s.min_length = 5;
  const Extractor ex(s);
  const std::string html =
      "<div class=entry><h4>CVE-2020-1111</h4><p>first text body</p></div>"
      "<div class=entry><h4>CVE-2020-2222, CVE-2020-3333</h4><p>shared body</p></div>"
      "<div class=entry><h4>CVE-2020-4444</h4><p>mentions CVE-2020-2222 in passing</p></div>";
  const auto one = ex.extract(html, "CVE-2020-1111");
  ASSERT_TRUE(std::holds_alternative<Extraction>(one));
  EXPECT_EQ(std::get<Extraction>(one).text, "first text body");
  const auto shared = ex.extract(html, "CVE-2020-2222");
  ASSERT_TRUE(std::holds_alternative<ExtractMiss>(shared));
  EXPECT_EQ(std::get<ExtractMiss>(shared).reason, MissReason::MultipleCves);
}

TEST(ExtractorModes, TooShortAndVectorLines) {
  ExtractorSpec s;
  s.id = "t";
  s.hosts = {"t.example"};
  const Extractor ex(s);
  const auto short_r = ex.extract("<p>CVE-2020-1111</p><p>tiny</p>", "CVE-2020-1111");
  ASSERT_TRUE(std::holds_alternative<ExtractMiss>(short_r));
  EXPECT_EQ(std::get<ExtractMiss>(short_r).reason, MissReason::TooShort);
  const auto r = ex.extract(
      "<p>CVE-2020-1111 allows remote attackers to read arbitrary files.</p>"
      "<p>Vector: CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N</p>",
      "CVE-2020-1111");
  ASSERT_TRUE(std::holds_alternative<Extraction>(r));
  EXPECT_EQ(std::get<Extraction>(r).text,
            "CVE-2020-1111 allows remote attackers to read arbitrary files.");
}
