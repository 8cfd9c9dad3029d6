#pragma once

// Page sources: where HTML comes from. Live HTTP, a headless browser run as a
// subprocess, or archived fixture pages on disk.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cvsstext/clock.hpp"
#include "cvsstext/robots.hpp"

namespace cvsstext::scrape {

struct PageResponse {
  /// Requests the politeness layer declined to send.
  enum class Refusal { None, Robots, CircuitOpen };

  int status = 0;  // HTTP status; 0 when no response arrived
  std::string body;
  bool timed_out = false;  // body holds whatever loaded before the deadline
  std::string error;
  Refusal refused = Refusal::None;
};

class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual PageResponse fetch(const std::string& url, Seconds timeout) = 0;
};

/// Serves archived pages described by `<dir>/pages.json`:
///
///   { "pages": [ { "url": "...", "file": "rel/path.html", "status": 200,
///                  "latency_secs": 0.0, "partial_bytes": 1200 } ],
///     "hosts": { "wpscan.com": { "block_after": 5, "block_status": 429 } } }
///
/// Unknown URLs answer 404. `latency_secs` advances the clock; when it exceeds
/// the timeout the response is cut to `partial_bytes` and flagged timed_out.
/// `block_after` answers `block_status` to every page request to that host
/// after the first N (robots.txt is not counted).
class FixtureSource final : public PageSource {
 public:
  FixtureSource(std::filesystem::path dir, Clock& clock);
  PageResponse fetch(const std::string& url, Seconds timeout) override;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  struct Page {
    std::filesystem::path file;
    int status = 200;
    double latency = 0.0;
    std::size_t partial_bytes = 0;
    bool has_partial = false;
  };
  struct HostRule {
    std::size_t block_after = 0;
    int block_status = 429;
  };

  std::filesystem::path dir_;
  Clock& clock_;
  std::map<std::string, Page> pages_;
  std::map<std::string, HostRule> hosts_;
  std::mutex mu_;
  std::map<std::string, std::size_t> served_;
};

/// libcurl-backed GET with redirects, a user agent and a hard deadline.
class HttpSource final : public PageSource {
 public:
  explicit HttpSource(std::string agent);
  ~HttpSource() override;
  HttpSource(const HttpSource&) = delete;
  HttpSource& operator=(const HttpSource&) = delete;
  PageResponse fetch(const std::string& url, Seconds timeout) override;

 private:
  std::string agent_;
};

/// Runs a headless browser that prints the rendered DOM to stdout, e.g.
/// {"chromium", "--headless", "--dump-dom", "{url}"}. "{url}" is substituted.
/// At the timeout the process is killed and whatever it printed is returned
/// with timed_out set.
class BrowserSource final : public PageSource {
 public:
  explicit BrowserSource(std::vector<std::string> command);
  PageResponse fetch(const std::string& url, Seconds timeout) override;

 private:
  std::vector<std::string> command_;
};

/// Per-host politeness state shared by every source of one crawl: robots.txt
/// policy, crawl-delay spacing, one in-flight request per host, and a circuit
/// breaker on consecutive Blocked answers (HTTP 403/429).
class HostGate {
 public:
  struct Options {
    std::string agent = "cvsstext-crawler/0.3";
    std::size_t circuit_threshold = 5;
    double min_delay_secs = 0.0;
  };

  HostGate(Clock& clock, Options options);

  /// Fetches through `inner` when robots allows and the circuit is closed.
  /// Blocks until the host's crawl delay since its previous response has
  /// elapsed.
  PageResponse fetch(PageSource& inner, const std::string& url, Seconds timeout);

  bool circuit_open(const std::string& host) const;
  std::size_t robots_fetches() const;

 private:
  struct HostState {
    std::mutex mu;
    bool robots_loaded = false;
    RobotsPolicy policy;
    double delay = 0.0;
    Seconds next_allowed{0.0};
    std::size_t consecutive_blocked = 0;
    bool open = false;
  };

  HostState& state(const std::string& key);

  Clock& clock_;
  Options options_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<HostState>> hosts_;
  std::size_t robots_fetches_ = 0;
};

/// PageSource adapter that routes every request through a HostGate.
class PoliteSource final : public PageSource {
 public:
  PoliteSource(PageSource& inner, HostGate& gate) : inner_(inner), gate_(gate) {}
  PageResponse fetch(const std::string& url, Seconds timeout) override {
    return gate_.fetch(inner_, url, timeout);
  }

 private:
  PageSource& inner_;
  HostGate& gate_;
};

inline bool is_blocked_status(int status) noexcept { return status == 429 || status == 403; }

}  // namespace cvsstext::scrape
