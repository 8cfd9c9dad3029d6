#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cvsstext/clock.hpp"
#include "cvsstext/extractor.hpp"
#include "cvsstext/nvd.hpp"
#include "cvsstext/page_source.hpp"

namespace cvsstext::scrape {

class UnknownExtractor : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CrawlJob {
  std::string cve_id;
  std::string url;
  std::string domain;  // host of url
  std::string extractor_id;
  bool rewrite_attempted = false;
};

struct DuplicateUrl {
  std::string url;
  std::string kept_cve;
  std::string dropped_cve;
};

struct CrawlPlan {
  std::vector<CrawlJob> jobs;
  std::vector<DuplicateUrl> duplicates;
};

/// One job per distinct reference URL whose host belongs to a selected
/// extractor. `selection` names extractor ids, site labels or hosts; an empty
/// selection selects every registered extractor. The first CVE to reference
/// a URL keeps it. Jobs are grouped by domain, in first-seen order.
CrawlPlan plan_crawl(const std::vector<nvd::VulnEntry>& entries,
                     const std::vector<std::string>& selection,
                     const ExtractorRegistry& registry);

class RewriteRule {
 public:
  RewriteRule(std::string domain, std::string pattern, std::string replacement);

  const std::string& domain() const noexcept { return domain_; }
  const std::string& pattern() const noexcept { return pattern_; }
  const std::string& replacement() const noexcept { return replacement_; }

  /// The rewritten absolute URL when `url` is on the rule's domain and its
  /// path matches the whole pattern. `replacement` may use $1..$9.
  std::optional<std::string> apply(const std::string& url) const;

 private:
  std::string domain_, pattern_, replacement_;
  std::regex re_;
};

std::vector<RewriteRule> load_rewrite_rules(const std::filesystem::path& path);
std::vector<RewriteRule> rewrite_rules_from_json(const nlohmann::json& j);

struct ScrapedText {
  std::string cve_id;
  std::string url;         // the URL the text was read from
  std::string origin_url;  // the referenced URL, before any rewrite
  std::string domain;
  std::string site;
  std::string extractor_id;
  std::string text;
  std::string anchor;
  std::string fetched_at;  // ISO 8601 UTC
  bool rewrite_attempted = false;
};

enum class FailureKind { HttpError, Timeout, Blocked, ExtractorMiss, Disallowed };
std::string_view to_string(FailureKind k) noexcept;

struct FetchFailure {
  CrawlJob job;
  std::string site;
  FailureKind kind = FailureKind::HttpError;
  int status = 0;
  std::string detail;
};

using FetchResult = std::variant<ScrapedText, FetchFailure>;

struct FetchOptions {
  Seconds timeout{20.0};
  /// Source of fetched_at; null means the system clock.
  const Clock* stamp_clock = nullptr;
};

/// Fetches the job's URL and runs its extractor. HttpError and ExtractorMiss
/// outcomes get exactly one retry when a rewrite rule applies. Content that
/// arrived before a timeout is still offered to the extractor.
FetchResult fetch_and_extract(CrawlJob job, const Extractor& extractor, PageSource& source,
                              const std::vector<RewriteRule>& rules, const FetchOptions& options);

struct CrawlOptions {
  std::size_t workers = 5;
  Seconds timeout{20.0};
  std::string agent = "cvsstext-crawler/0.3";
  std::size_t circuit_threshold = 5;
  /// Stamp fetched_at from the crawl clock instead of the system clock, so
  /// offline runs produce identical files.
  bool clock_timestamps = false;
};

/// Page sources by render mode. `browser` may be null, in which case the
/// http source serves browser-rendered extractors too.
struct SourceSet {
  PageSource* http = nullptr;
  PageSource* browser = nullptr;
};

/// Job queue with one lane per domain. A lane hands out one job at a time;
/// the next job of that domain becomes available when the previous one is
/// completed. Pop blocks until a job is available or the queue is drained.
class LaneQueue {
 public:
  struct Lease {
    std::size_t index = 0;  // position in submission order
    CrawlJob job;
  };

  void push(std::size_t index, CrawlJob job);
  void close();
  std::optional<Lease> pop();
  void complete(const Lease& lease);

 private:
  struct Lane {
    std::deque<Lease> pending;
    bool busy = false;
  };
  std::mutex mu_;
  std::condition_variable cv_;
  std::map<std::string, Lane> lanes_;
  std::deque<std::string> ready_;  // lanes with work and no job in flight
  std::size_t in_flight_ = 0;
  bool closed_ = false;
};

struct CrawlResult {
  std::vector<CrawlJob> jobs;
  std::vector<FetchResult> results;  // results[i] belongs to jobs[i]
};

/// Producer-consumer crawl: a producer thread feeds the lane queue, a pool of
/// workers consumes it, and every request goes through one shared HostGate.
CrawlResult run_crawl(const std::vector<CrawlJob>& jobs, const ExtractorRegistry& registry,
                      const std::vector<RewriteRule>& rules, SourceSet sources, Clock& clock,
                      const CrawlOptions& options);

struct YieldRow {
  std::size_t attempted = 0;
  std::size_t crawled = 0;
  double ratio() const { return attempted ? static_cast<double>(crawled) / attempted : 0.0; }
};

struct YieldReport {
  std::map<std::string, YieldRow> sites;
  YieldRow total;
};

/// Success counts per site label. Sites without jobs do not appear.
YieldReport yield_report(const CrawlResult& crawl, const ExtractorRegistry& registry);
nlohmann::json to_json(const YieldReport& r);

nlohmann::json to_json(const ScrapedText& t, bool with_timestamp = true);
ScrapedText scraped_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FetchFailure& f);

void write_scraped_jsonl(std::ostream& out, const std::vector<ScrapedText>& texts);
std::vector<ScrapedText> read_scraped_jsonl(std::istream& in);

}  // namespace cvsstext::scrape
