#pragma once

// A scripted page source that records every request it receives, for
// checking what the politeness layer lets through.

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "cvsstext/page_source.hpp"
#include "cvsstext/url.hpp"

namespace testsupport {

using cvsstext::scrape::Clock;
using cvsstext::scrape::PageResponse;
using cvsstext::scrape::PageSource;
using cvsstext::scrape::Seconds;

struct SpyRecord {
  std::string host;
  std::string url;
  double start = 0;
  double end = 0;
};

class SpySource final : public PageSource {
 public:
  using Handler = std::function<PageResponse(const cvsstext::Url&, std::size_t nth_for_host)>;

  SpySource(Clock& clock, Handler handler) : clock_(clock), handler_(std::move(handler)) {}

  /// robots.txt body per host; hosts without one answer 404.
  std::map<std::string, std::string> robots;
  /// Simulated latency per request.
  std::function<double(const std::string& url)> latency = [](const std::string&) { return 0.5; };

  PageResponse fetch(const std::string& url, Seconds) override {
    const auto u = cvsstext::Url::parse(url);
    SpyRecord rec{u.host, url, clock_.now().count(), 0};
    PageResponse r;
    std::size_t nth = 0;
    {
      std::lock_guard lock(mu_);
      if (u.path != "/robots.txt") nth = ++page_requests_[u.host];
    }
    if (u.path == "/robots.txt") {
      const auto it = robots.find(u.host);
      r.status = it == robots.end() ? 404 : 200;
      if (it != robots.end()) r.body = it->second;
    } else {
      r = handler_(u, nth);
    }
    clock_.sleep_until(clock_.now() + Seconds(latency(url)));
    rec.end = clock_.now().count();
    std::lock_guard lock(mu_);
    log_.push_back(rec);
    return r;
  }

  std::vector<SpyRecord> log() const {
    std::lock_guard lock(mu_);
    return log_;
  }

 private:
  Clock& clock_;
  Handler handler_;
  mutable std::mutex mu_;
  std::vector<SpyRecord> log_;
  std::map<std::string, std::size_t> page_requests_;
};

}  // namespace testsupport
