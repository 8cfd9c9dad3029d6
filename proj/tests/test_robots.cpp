#include <gtest/gtest.h>

#include "cvsstext/robots.hpp"

using namespace cvsstext::scrape;

namespace {

RobotsDecision check(const char* robots, const char* url, const char* agent = "cvsstext-crawler/0.3") {
  return check_robots(RobotsPolicy::parse(robots), url, agent);
}

}  // namespace

TEST(Robots, EmptyDisallowAllowsEverything) {
  const auto d = check("User-agent: *\nDisallow:", "https://x.org/anything");
  EXPECT_TRUE(d.allowed);
  EXPECT_DOUBLE_EQ(d.crawl_delay, 0.0);
}

TEST(Robots, DisallowRoot) {
  EXPECT_FALSE(check("User-agent: *\nDisallow: /", "https://x.org/a").allowed);
}

TEST(Robots, CrawlDelay) {
  const auto d = check("User-agent: *\nCrawl-delay: 5", "https://x.org/a");
  EXPECT_TRUE(d.allowed);
  EXPECT_DOUBLE_EQ(d.crawl_delay, 5.0);
}

TEST(Robots, AbsentFileIsPermissive) {
  EXPECT_TRUE(check_robots(RobotsPolicy::permissive(), "https://x.org/private", "a").allowed);
}

TEST(Robots, LongestMatchWinsAndAllowWinsTies) {
  const char* r = "User-agent: *\nDisallow: /security/\nAllow: /security/center/\n"
                  "Disallow: /security/center/private/\n";
  EXPECT_FALSE(check(r, "https://x.org/security/old").allowed);
  EXPECT_TRUE(check(r, "https://x.org/security/center/a").allowed);
  EXPECT_FALSE(check(r, "https://x.org/security/center/private/a").allowed);
  EXPECT_TRUE(check("User-agent: *\nDisallow: /a\nAllow: /a\n", "https://x.org/a").allowed);
}

TEST(Robots, Wildcards) {
  const char* r = "User-agent: *\nDisallow: /*.pdf$\nDisallow: /tmp*/x\n";
  EXPECT_FALSE(check(r, "https://x.org/docs/file.pdf").allowed);
  EXPECT_TRUE(check(r, "https://x.org/docs/file.pdf?x=1").allowed);
  EXPECT_FALSE(check(r, "https://x.org/tmp123/x").allowed);
  EXPECT_TRUE(check(r, "https://x.org/tmp123/y").allowed);
  EXPECT_TRUE(robots_pattern_matches("/", "/anything"));
  EXPECT_FALSE(robots_pattern_matches("/a$", "/ab"));
}

TEST(Robots, QueryIsPartOfThePath) {
  EXPECT_FALSE(check("User-agent: *\nDisallow: /search?q=", "https://x.org/search?q=cve").allowed);
}

TEST(Robots, AgentGroupSelection) {
  const char* r =
      "User-agent: *\nDisallow: /\n\n"
      "User-agent: cvsstext\nDisallow: /private/\nCrawl-delay: 2\n\n"
      "User-agent: other\nUser-agent: cvsstext-crawler\nAllow: /\nCrawl-delay: 7\n";
  // The longest matching token wins.
  auto d = check(r, "https://x.org/private/a", "cvsstext-crawler/0.3");
  EXPECT_TRUE(d.allowed);
  EXPECT_DOUBLE_EQ(d.crawl_delay, 7.0);
  d = check(r, "https://x.org/private/a", "cvsstext/1.0");
  EXPECT_FALSE(d.allowed);
  EXPECT_DOUBLE_EQ(d.crawl_delay, 2.0);
  EXPECT_FALSE(check(r, "https://x.org/public", "SomeBot/2.1").allowed);
}

TEST(Robots, MalformedLinesDegradeGracefully) {
  const char* r = "garbage line\nUser-agent: *\nCrawl-delay: soon\nDisallow: /x # comment\n";
  const auto d = check(r, "https://x.org/x/1");
  EXPECT_FALSE(d.allowed);
  EXPECT_DOUBLE_EQ(d.crawl_delay, 0.0);
  EXPECT_TRUE(check("", "https://x.org/").allowed);
}
