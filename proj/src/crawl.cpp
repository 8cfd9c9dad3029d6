#include "cvsstext/crawl.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cvsstext/url.hpp"

namespace cvsstext::scrape {

using nlohmann::json;

CrawlPlan plan_crawl(const std::vector<nvd::VulnEntry>& entries,
                     const std::vector<std::string>& selection,
                     const ExtractorRegistry& registry) {
  std::set<std::string> selected;
  if (selection.empty()) {
    for (const auto& id : registry.ids()) selected.insert(id);
  }
  for (const auto& name : selection) {
    const auto* e = registry.resolve(name);
    if (!e) throw UnknownExtractor("no extractor registered for '" + name + "'");
    selected.insert(e->spec().id);
  }

  CrawlPlan plan;
  std::unordered_map<std::string, std::string> owner;  // url -> cve
  std::vector<std::string> domain_order;
  std::map<std::string, std::vector<CrawlJob>> by_domain;
  for (const auto& entry : entries) {
    for (const auto& ref : entry.references) {
      const auto u = Url::try_parse(ref.url);
      if (!u) continue;
      const auto* ex = registry.for_host(u->host);
      if (!ex || !selected.count(ex->spec().id)) continue;
      const auto [it, fresh] = owner.emplace(ref.url, entry.cve_id);
      if (!fresh) {
        if (it->second != entry.cve_id) {
          spdlog::info("duplicate reference {} (kept {}, dropped {})", ref.url, it->second,
                       entry.cve_id);
          plan.duplicates.push_back({ref.url, it->second, entry.cve_id});
        }
        continue;
      }
      auto& lane = by_domain[u->host];
      if (lane.empty()) domain_order.push_back(u->host);
      lane.push_back(CrawlJob{entry.cve_id, ref.url, u->host, ex->spec().id, false});
    }
  }
  for (const auto& d : domain_order) {
    auto& lane = by_domain[d];
    std::move(lane.begin(), lane.end(), std::back_inserter(plan.jobs));
  }
  return plan;
}

RewriteRule::RewriteRule(std::string domain, std::string pattern, std::string replacement)
    : domain_(std::move(domain)), pattern_(std::move(pattern)), replacement_(std::move(replacement)) {
  try {
    re_ = std::regex(pattern_, std::regex::ECMAScript);
  } catch (const std::regex_error&) {
    throw ExtractorConfigError("rewrite rule for " + domain_ + ": bad pattern '" + pattern_ + "'");
  }
}

std::optional<std::string> RewriteRule::apply(const std::string& url) const {
  const auto u = Url::try_parse(url);
  if (!u || u->host != domain_) return std::nullopt;
  std::smatch m;
  const std::string path = u->path;
  if (!std::regex_match(path, m, re_)) return std::nullopt;
  std::string out = m.format(replacement_, std::regex_constants::format_default);
  if (!Url::try_parse(out)) {
    spdlog::warn("rewrite of {} produced invalid URL '{}'", url, out);
    return std::nullopt;
  }
  return out;
}

std::vector<RewriteRule> rewrite_rules_from_json(const json& j) {
  std::vector<RewriteRule> rules;
  const json& arr = j.is_object() ? j.at("rules") : j;
  for (const auto& r : arr) {
    rules.emplace_back(r.at("domain").get<std::string>(), r.at("pattern").get<std::string>(),
                       r.at("replacement").get<std::string>());
  }
  return rules;
}

std::vector<RewriteRule> load_rewrite_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ExtractorConfigError("cannot read rewrite rules " + path.string());
  try {
    return rewrite_rules_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ExtractorConfigError(path.string() + ": " + e.what());
  }
}

std::string_view to_string(FailureKind k) noexcept {
  switch (k) {
    case FailureKind::HttpError: return "http_error";
    case FailureKind::Timeout: return "timeout";
    case FailureKind::Blocked: return "blocked";
    case FailureKind::ExtractorMiss: return "extractor_miss";
    case FailureKind::Disallowed: return "disallowed";
  }
  return "?";
}

namespace {

std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
}

std::string stamp(const Clock* clock) {
  if (clock) return iso_utc(static_cast<std::time_t>(clock->now().count()));
  return iso_utc(std::time(nullptr));
}

FetchResult attempt(const CrawlJob& job, const std::string& url, const Extractor& extractor,
                    PageSource& source, const FetchOptions& options) {
  const auto& spec = extractor.spec();
  auto fail = [&](FailureKind kind, int status, std::string detail) -> FetchResult {
    return FetchFailure{job, spec.site, kind, status, std::move(detail)};
  };

  const PageResponse r = source.fetch(url, options.timeout);
  if (r.refused == PageResponse::Refusal::Robots) {
    return fail(FailureKind::Disallowed, 0, "denied by robots.txt");
  }
  if (r.refused == PageResponse::Refusal::CircuitOpen) {
    return fail(FailureKind::Blocked, 0, "circuit open");
  }
  if (is_blocked_status(r.status)) return fail(FailureKind::Blocked, r.status, "blocked");
  if (r.timed_out && r.body.empty()) {
    return fail(FailureKind::Timeout, r.status, "no content before timeout");
  }
  if (r.status == 0 && !r.timed_out) return fail(FailureKind::HttpError, 0, r.error);
  if (r.status < 200 || r.status >= 300) {
    if (!r.timed_out) return fail(FailureKind::HttpError, r.status, "HTTP " + std::to_string(r.status));
  }

  auto extracted = extractor.extract(r.body, job.cve_id);
  if (auto* miss = std::get_if<ExtractMiss>(&extracted)) {
    if (r.timed_out) {
      return fail(FailureKind::Timeout, r.status,
                  "partial page: " + std::string(to_string(miss->reason)));
    }
    return fail(FailureKind::ExtractorMiss, r.status,
                std::string(to_string(miss->reason)) + ": " + miss->detail);
  }
  auto& ex = std::get<Extraction>(extracted);
  ScrapedText t;
  t.cve_id = job.cve_id;
  t.url = url;
  t.origin_url = job.url;
  t.domain = job.domain;
  t.site = spec.site;
  t.extractor_id = spec.id;
  t.text = std::move(ex.text);
  t.anchor = std::move(ex.anchor);
  t.fetched_at = stamp(options.stamp_clock);
  t.rewrite_attempted = job.rewrite_attempted;
  return t;
}

}  // namespace

FetchResult fetch_and_extract(CrawlJob job, const Extractor& extractor, PageSource& source,
                              const std::vector<RewriteRule>& rules, const FetchOptions& options) {
  FetchResult first = attempt(job, job.url, extractor, source, options);
  const auto* failure = std::get_if<FetchFailure>(&first);
  if (!failure || job.rewrite_attempted) return first;
  if (failure->kind != FailureKind::HttpError && failure->kind != FailureKind::ExtractorMiss) {
    return first;
  }
  for (const auto& rule : rules) {
    const auto rewritten = rule.apply(job.url);
    if (!rewritten) continue;
    spdlog::debug("{}: retrying {} as {}", job.cve_id, job.url, *rewritten);
    job.rewrite_attempted = true;
    return attempt(job, *rewritten, extractor, source, options);
  }
  return first;
}

void LaneQueue::push(std::size_t index, CrawlJob job) {
  {
    std::lock_guard lock(mu_);
    const std::string domain = job.domain;
    Lane& lane = lanes_[domain];
    const bool was_idle = lane.pending.empty() && !lane.busy;
    lane.pending.push_back(Lease{index, std::move(job)});
    if (was_idle) ready_.push_back(domain);
  }
  cv_.notify_one();
}

void LaneQueue::close() {
  {
    std::lock_guard lock(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

std::optional<LaneQueue::Lease> LaneQueue::pop() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return !ready_.empty() || (closed_ && in_flight_ == 0); });
  if (ready_.empty()) return std::nullopt;
  const std::string domain = std::move(ready_.front());
  ready_.pop_front();
  Lane& lane = lanes_[domain];
  Lease lease = std::move(lane.pending.front());
  lane.pending.pop_front();
  lane.busy = true;
  ++in_flight_;
  return lease;
}

void LaneQueue::complete(const Lease& lease) {
  {
    std::lock_guard lock(mu_);
    Lane& lane = lanes_[lease.job.domain];
    lane.busy = false;
    --in_flight_;
    if (!lane.pending.empty()) ready_.push_back(lease.job.domain);
  }
  cv_.notify_all();
}

CrawlResult run_crawl(const std::vector<CrawlJob>& jobs, const ExtractorRegistry& registry,
                      const std::vector<RewriteRule>& rules, SourceSet sources, Clock& clock,
                      const CrawlOptions& options) {
  if (!sources.http) throw std::invalid_argument("run_crawl needs an http page source");
  for (const auto& j : jobs) {
    if (!registry.by_id(j.extractor_id)) {
      throw UnknownExtractor("job for " + j.url + " names unknown extractor " + j.extractor_id);
    }
  }

  HostGate gate(clock, HostGate::Options{options.agent, options.circuit_threshold, 0.0});
  PoliteSource http(*sources.http, gate);
  PoliteSource browser(sources.browser ? *sources.browser : *sources.http, gate);
  FetchOptions fopts{options.timeout, options.clock_timestamps ? &clock : nullptr};

  CrawlResult out;
  out.jobs = jobs;
  std::vector<std::optional<FetchResult>> slots(jobs.size());
  std::mutex sink_mu;

  LaneQueue queue;
  std::thread producer([&] {
    for (std::size_t i = 0; i < jobs.size(); ++i) queue.push(i, jobs[i]);
    queue.close();
  });

  const std::size_t n_workers = std::max<std::size_t>(1, options.workers);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      while (auto lease = queue.pop()) {
        const auto* ex = registry.by_id(lease->job.extractor_id);
        PageSource& src = ex->spec().render == RenderMode::Browser ? static_cast<PageSource&>(browser)
                                                                   : static_cast<PageSource&>(http);
        FetchResult r = fetch_and_extract(lease->job, *ex, src, rules, fopts);
        {
          std::lock_guard lock(sink_mu);
          slots[lease->index] = std::move(r);
        }
        queue.complete(*lease);
      }
    });
  }
  producer.join();
  for (auto& t : workers) t.join();

  out.results.reserve(slots.size());
  for (auto& s : slots) out.results.push_back(std::move(*s));
  return out;
}

YieldReport yield_report(const CrawlResult& crawl, const ExtractorRegistry& registry) {
  YieldReport rep;
  for (std::size_t i = 0; i < crawl.jobs.size(); ++i) {
    const auto* ex = registry.by_id(crawl.jobs[i].extractor_id);
    const std::string site = ex ? ex->spec().site : crawl.jobs[i].domain;
    auto& row = rep.sites[site];
    ++row.attempted;
    ++rep.total.attempted;
    if (i < crawl.results.size() && std::holds_alternative<ScrapedText>(crawl.results[i])) {
      ++row.crawled;
      ++rep.total.crawled;
    }
  }
  return rep;
}

json to_json(const YieldReport& r) {
  auto row = [](const YieldRow& y) {
    return json{{"attempted", y.attempted}, {"crawled", y.crawled}, {"ratio", y.ratio()}};
  };
  json sites = json::object();
  for (const auto& [name, y] : r.sites) sites[name] = row(y);
  return json{{"sites", sites}, {"total", row(r.total)}};
}

json to_json(const ScrapedText& t, bool with_timestamp) {
  json j{{"cve_id", t.cve_id},     {"url", t.url},
         {"origin_url", t.origin_url}, {"domain", t.domain},
         {"site", t.site},         {"extractor", t.extractor_id},
         {"rewrite_attempted", t.rewrite_attempted},
         {"anchor", t.anchor},     {"text", t.text}};
  if (with_timestamp) j["fetched_at"] = t.fetched_at;
  return j;
}

ScrapedText scraped_from_json(const json& j) {
  ScrapedText t;
  t.cve_id = j.at("cve_id").get<std::string>();
  t.url = j.at("url").get<std::string>();
  t.origin_url = j.value("origin_url", t.url);
  t.domain = j.value("domain", "");
  t.site = j.value("site", t.domain);
  t.extractor_id = j.value("extractor", "");
  t.rewrite_attempted = j.value("rewrite_attempted", false);
  t.anchor = j.value("anchor", "");
  t.text = j.at("text").get<std::string>();
  t.fetched_at = j.value("fetched_at", "");
  return t;
}

json to_json(const FetchFailure& f) {
  return json{{"cve_id", f.job.cve_id},
              {"url", f.job.url},
              {"domain", f.job.domain},
              {"site", f.site},
              {"extractor", f.job.extractor_id},
              {"kind", to_string(f.kind)},
              {"status", f.status},
              {"rewrite_attempted", f.job.rewrite_attempted},
              {"detail", f.detail}};
}

void write_scraped_jsonl(std::ostream& out, const std::vector<ScrapedText>& texts) {
  for (const auto& t : texts) out << to_json(t).dump() << '\n';
}

std::vector<ScrapedText> read_scraped_jsonl(std::istream& in) {
  std::vector<ScrapedText> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(scraped_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw nvd::SchemaError("scraped text line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cvsstext::scrape
