#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvsstext/nvd.hpp"
#include "support/feed_builder.hpp"

using namespace cvsstext;
using namespace cvsstext::nvd;
using testsupport::ItemSpec;
using testsupport::make_feed;

namespace {

const std::string kFixtureFeed = std::string(CVSSTEXT_FIXTURES) + "/nvd/nvdcve-1.1-sample.json";

}  // namespace

TEST(LoadFeed, ThreeItemsTwoWithV3) {
  const auto feed = make_feed({
      {"CVE-2021-0001", "first", {"https://a.example/1"}, "CVSS:3.1/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H", 9.8},
      {"CVE-2021-0002", "second", {}, std::nullopt, std::nullopt},
      {"CVE-2021-0003", "third", {}, "CVSS:3.0/AV:L/AC:L/PR:L/UI:N/S:U/C:H/I:N/A:N", 5.5},
  });
  const auto entries = load_feed(feed);
  ASSERT_EQ(entries.size(), 3u);
  EXPECT_TRUE(entries[0].gt_vector.has_value());
  EXPECT_FALSE(entries[1].gt_vector.has_value());
  EXPECT_TRUE(entries[2].gt_vector.has_value());
  EXPECT_EQ(entries[0].references.at(0).url, "https://a.example/1");
  EXPECT_EQ(filter_v3(entries).size(), 2u);
}

TEST(LoadFeed, EmptyDescriptionListIsSchemaError) {
  auto item = testsupport::make_item({"CVE-2021-0001", "x", {}, std::nullopt, std::nullopt});
  item["cve"]["description"]["description_data"] = nlohmann::json::array();
  const nlohmann::json feed = {{"CVE_Items", {item}}};
  EXPECT_THROW(load_feed(feed.dump()), SchemaError);
}

TEST(LoadFeed, StructuralErrors) {
  EXPECT_THROW(load_feed("{}"), SchemaError);
  EXPECT_THROW(load_feed("not json"), SchemaError);
  EXPECT_THROW(load_feed(make_feed({{"CVE-21-1", "bad id", {}, std::nullopt, std::nullopt}})),
               SchemaError);
  EXPECT_THROW(load_feed(make_feed({{"CVE-2021-0001", "a", {}, std::nullopt, std::nullopt},
                                    {"CVE-2021-0001", "b", {}, std::nullopt, std::nullopt}})),
               SchemaError);
  EXPECT_THROW(load_feed(make_feed({{"CVE-2021-0001", "a", {}, "AV:N/AC:L", 1.0}})), SchemaError);
}

TEST(LoadFeed, InvalidUtf8ReportsOffset) {
  std::string feed = make_feed({{"CVE-2021-0001", "caf\xC3\xA9", {}, std::nullopt, std::nullopt}});
  const auto pos = feed.find("\xC3\xA9");
  feed[pos + 1] = '\x28';
  try {
    load_feed(feed);
    FAIL();
  } catch (const EncodingError& e) {
    EXPECT_EQ(e.offset(), pos);
  }
}

TEST(LoadFeed, FixtureFeedCounters) {
  LoadReport report;
  const auto entries = load_feed_file(kFixtureFeed, &report);
  EXPECT_EQ(report.items, 24u);
  EXPECT_EQ(report.rejected, 1u);
  EXPECT_EQ(report.dropped_references, 1u);  // the ftp:// link
  EXPECT_EQ(report.score_mismatches, 0u);
  EXPECT_EQ(entries.size(), 23u);

  const auto v3 = filter_v3(entries);
  EXPECT_LT(v3.size(), entries.size());
  EXPECT_EQ(v3.size(), 22u);

  const auto sudo = std::find_if(entries.begin(), entries.end(),
                                 [](const auto& e) { return e.cve_id == "CVE-2021-3156"; });
  ASSERT_NE(sudo, entries.end());
  EXPECT_TRUE(sudo->description.starts_with("Sudo before"));
  EXPECT_EQ(sudo->published.iso(), "2021-01-26");
}

TEST(LoadFeed, GzipAndPlainAgree) {
  const auto plain = load_feed_file(kFixtureFeed);
  const auto gz = load_feed_file(kFixtureFeed + ".gz");
  EXPECT_EQ(plain, gz);
}

TEST(LoadFeed, LosslessForIdsAndUrls) {
  // Every non-rejected item yields one entry and keeps every http(s) URL.
  std::vector<ItemSpec> specs;
  for (int k = 0; k < 50; ++k) {
    ItemSpec s{"CVE-2020-" + std::to_string(10000 + k), "d" + std::to_string(k), {}, std::nullopt,
               std::nullopt};
    for (int r = 0; r < k % 4; ++r) {
      s.urls.push_back("https://host" + std::to_string(r) + ".example/" + std::to_string(k));
    }
    specs.push_back(s);
  }
  const auto entries = load_feed(make_feed(specs));
  ASSERT_EQ(entries.size(), specs.size());
  for (std::size_t k = 0; k < specs.size(); ++k) {
    EXPECT_EQ(entries[k].cve_id, specs[k].cve_id);
    ASSERT_EQ(entries[k].references.size(), specs[k].urls.size());
    for (std::size_t r = 0; r < specs[k].urls.size(); ++r) {
      EXPECT_EQ(entries[k].references[r].url, specs[k].urls[r]);
    }
  }
}

TEST(LoadFeed, DuplicateAcrossFeedsRejected) {
  const auto dir = std::filesystem::temp_directory_path() / "cvsstext_nvd_dup";
  std::filesystem::create_directories(dir);
  for (const char* name : {"a.json", "b.json"}) {
    std::ofstream(dir / name) << make_feed({{"CVE-2021-0001", name, {}, std::nullopt, std::nullopt}});
  }
  EXPECT_THROW(load_feed_files({dir / "a.json", dir / "b.json"}), SchemaError);
  std::filesystem::remove_all(dir);
}

TEST(FilterV3, Trivia) {
  EXPECT_TRUE(filter_v3({}).empty());
  VulnEntry with;
  with.cve_id = "CVE-2021-0001";
  with.gt_vector = cvss::parse_vector("AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H");
  VulnEntry without;
  without.cve_id = "CVE-2021-0002";
  const auto out = filter_v3({with, without});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].cve_id, "CVE-2021-0001");
}

TEST(DescriptionStats, Examples) {
  auto entries_of = [](std::vector<std::size_t> lens) {
    std::vector<VulnEntry> out;
    for (auto n : lens) {
      VulnEntry e;
      e.description = std::string(n, 'x');
      out.push_back(e);
    }
    return out;
  };
  const auto s = description_stats(entries_of({10, 20, 30}));
  EXPECT_DOUBLE_EQ(s.mean_len, 20.0);
  EXPECT_EQ(s.median_len, 20u);
  EXPECT_EQ(s.min_len, 10u);
  EXPECT_EQ(s.max_len, 30u);
  EXPECT_EQ(description_stats(entries_of({1, 2, 3, 100})).median_len, 2u);
  EXPECT_THROW(description_stats({}), EmptyInput);
}

TEST(Jsonl, RoundTrip) {
  const auto entries = load_feed_file(kFixtureFeed);
  std::stringstream ss;
  write_jsonl(ss, entries);
  EXPECT_EQ(read_jsonl(ss), entries);
}

TEST(CveIds, FindInText) {
  EXPECT_EQ(find_cve_ids("see cve-2021-1148 and CVE-2021-1148, CVE_2020_12345"),
            (std::vector<std::string>{"CVE-2021-1148", "CVE-2020-12345"}));
  EXPECT_TRUE(find_cve_ids("CVE-21-1 CVE-2021-12 XCVE-2021-1234").empty());
  EXPECT_TRUE(is_valid_cve_id("CVE-2021-1234567"));
  EXPECT_FALSE(is_valid_cve_id("cve-2021-1234"));
}
