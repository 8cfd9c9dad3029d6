#include "cvsstext/page_source.hpp"

#include <curl/curl.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "cvsstext/url.hpp"

extern char** environ;

namespace cvsstext::scrape {

void SteadyClock::sleep_until(Seconds t) {
  const auto d = t - now();
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

FixtureSource::FixtureSource(std::filesystem::path dir, Clock& clock)
    : dir_(std::move(dir)), clock_(clock) {
  const auto manifest = dir_ / "pages.json";
  if (!std::filesystem::exists(manifest)) {
    throw std::runtime_error("fixture manifest missing: " + manifest.string());
  }
  const auto j = nlohmann::json::parse(read_file(manifest));
  for (const auto& p : j.value("pages", nlohmann::json::array())) {
    Page page;
    page.file = p.at("file").get<std::string>();
    page.status = p.value("status", 200);
    page.latency = p.value("latency_secs", 0.0);
    if (p.contains("partial_bytes") && !p["partial_bytes"].is_null()) {
      page.partial_bytes = p["partial_bytes"].get<std::size_t>();
      page.has_partial = true;
    }
    pages_[p.at("url").get<std::string>()] = std::move(page);
  }
  const auto hosts = j.value("hosts", nlohmann::json::object());
  for (const auto& [host, h] : hosts.items()) {
    hosts_[host] = HostRule{h.value("block_after", std::size_t{0}), h.value("block_status", 429)};
  }
}

PageResponse FixtureSource::fetch(const std::string& url, Seconds timeout) {
  PageResponse r;
  const auto u = Url::try_parse(url);
  if (!u) {
    r.error = "invalid url";
    return r;
  }
  if (auto h = hosts_.find(u->host);
      h != hosts_.end() && h->second.block_after > 0 && u->path != "/robots.txt") {
    std::size_t n = 0;
    {
      std::lock_guard lock(mu_);
      n = ++served_[u->host];
    }
    if (n > h->second.block_after) {
      r.status = h->second.block_status;
      return r;
    }
  }

  const auto it = pages_.find(url);
  if (it == pages_.end()) {
    const auto robots = dir_ / "robots" / (u->host + ".txt");
    if (u->path == "/robots.txt" && std::filesystem::exists(robots)) {
      r.status = 200;
      r.body = read_file(robots);
    } else {
      r.status = 404;
    }
    return r;
  }
  const Page& page = it->second;
  if (page.latency > timeout.count()) {
    clock_.sleep_until(clock_.now() + timeout);
    r.timed_out = true;
    if (page.has_partial) {
      r.status = page.status;
      r.body = read_file(dir_ / page.file).substr(0, page.partial_bytes);
    }
    return r;
  }
  if (page.latency > 0) clock_.sleep_until(clock_.now() + Seconds(page.latency));
  r.status = page.status;
  r.body = read_file(dir_ / page.file);
  return r;
}

namespace {

std::once_flag curl_once;

std::size_t write_body(char* data, std::size_t size, std::size_t n, void* user) {
  static_cast<std::string*>(user)->append(data, size * n);
  return size * n;
}

}  // namespace

HttpSource::HttpSource(std::string agent) : agent_(std::move(agent)) {
  std::call_once(curl_once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

HttpSource::~HttpSource() = default;

PageResponse HttpSource::fetch(const std::string& url, Seconds timeout) {
  PageResponse r;
  std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> h(curl_easy_init(), &curl_easy_cleanup);
  if (!h) {
    r.error = "curl_easy_init failed";
    return r;
  }
  curl_easy_setopt(h.get(), CURLOPT_URL, url.c_str());
  curl_easy_setopt(h.get(), CURLOPT_USERAGENT, agent_.c_str());
  curl_easy_setopt(h.get(), CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(h.get(), CURLOPT_MAXREDIRS, 10L);
  curl_easy_setopt(h.get(), CURLOPT_NOSIGNAL, 1L);
  curl_easy_setopt(h.get(), CURLOPT_ACCEPT_ENCODING, "");
  curl_easy_setopt(h.get(), CURLOPT_TIMEOUT_MS, static_cast<long>(timeout.count() * 1000));
  curl_easy_setopt(h.get(), CURLOPT_WRITEFUNCTION, &write_body);
  curl_easy_setopt(h.get(), CURLOPT_WRITEDATA, &r.body);
  const CURLcode rc = curl_easy_perform(h.get());
  long status = 0;
  curl_easy_getinfo(h.get(), CURLINFO_RESPONSE_CODE, &status);
  r.status = static_cast<int>(status);
  if (rc == CURLE_OPERATION_TIMEDOUT) {
    r.timed_out = true;
  } else if (rc != CURLE_OK) {
    r.error = curl_easy_strerror(rc);
    r.status = 0;
  }
  return r;
}

BrowserSource::BrowserSource(std::vector<std::string> command) : command_(std::move(command)) {
  if (command_.empty()) throw std::invalid_argument("browser command is empty");
}

PageResponse BrowserSource::fetch(const std::string& url, Seconds timeout) {
  PageResponse r;
  std::vector<std::string> args;
  for (auto a : command_) {
    for (auto pos = a.find("{url}"); pos != std::string::npos; pos = a.find("{url}", pos)) {
      a.replace(pos, 5, url);
      pos += url.size();
    }
    args.push_back(std::move(a));
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  int fds[2];
  if (pipe(fds) != 0) {
    r.error = "pipe failed";
    return r;
  }
  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_adddup2(&fa, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&fa, fds[0]);
  posix_spawn_file_actions_addopen(&fa, STDERR_FILENO, "/dev/null", O_WRONLY, 0);
  pid_t pid = 0;
  const int rc = posix_spawnp(&pid, argv[0], &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  close(fds[1]);
  if (rc != 0) {
    close(fds[0]);
    r.error = std::string("cannot start ") + args[0];
    return r;
  }

  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout);
  char buf[65536];
  bool eof = false;
  while (!eof) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      r.timed_out = true;
      break;
    }
    pollfd p{fds[0], POLLIN, 0};
    const int n = poll(&p, 1, static_cast<int>(left.count()));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) continue;
    const ssize_t got = read(fds[0], buf, sizeof buf);
    if (got <= 0) {
      eof = true;
    } else {
      r.body.append(buf, static_cast<std::size_t>(got));
    }
  }
  close(fds[0]);
  if (r.timed_out) kill(pid, SIGKILL);
  int wstatus = 0;
  waitpid(pid, &wstatus, 0);
  if (!r.timed_out && !(WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0)) {
    r.error = "browser exited abnormally";
    return r;
  }
  // A rendered DOM carries no status line; any output counts as a page.
  if (!r.body.empty()) r.status = 200;
  return r;
}

HostGate::HostGate(Clock& clock, Options options) : clock_(clock), options_(std::move(options)) {}

HostGate::HostState& HostGate::state(const std::string& key) {
  std::lock_guard lock(mu_);
  auto& slot = hosts_[key];
  if (!slot) slot = std::make_unique<HostState>();
  return *slot;
}

bool HostGate::circuit_open(const std::string& host) const {
  HostState* st = nullptr;
  {
    std::lock_guard lock(mu_);
    const auto it = hosts_.find(host);
    if (it == hosts_.end()) return false;
    st = it->second.get();
  }
  std::lock_guard lock(st->mu);
  return st->open;
}

std::size_t HostGate::robots_fetches() const {
  std::lock_guard lock(mu_);
  return robots_fetches_;
}

PageResponse HostGate::fetch(PageSource& inner, const std::string& url, Seconds timeout) {
  const auto u = Url::try_parse(url);
  if (!u) {
    PageResponse r;
    r.error = "invalid url";
    return r;
  }
  HostState& st = state(u->host);
  std::lock_guard lock(st.mu);  // one request in flight per host

  if (st.open) {
    PageResponse r;
    r.refused = PageResponse::Refusal::CircuitOpen;
    return r;
  }
  if (!st.robots_loaded) {
    clock_.sleep_until(st.next_allowed);
    const auto robots = inner.fetch(u->origin() + "/robots.txt", timeout);
    {
      std::lock_guard l2(mu_);
      ++robots_fetches_;
    }
    if (robots.status == 200 && !robots.timed_out) {
      st.policy = RobotsPolicy::parse(robots.body);
    } else {
      spdlog::debug("{}: no robots.txt (status {}), crawling permissively", u->host,
                    robots.status);
    }
    st.robots_loaded = true;
    st.delay = std::max(options_.min_delay_secs,
                        check_robots(st.policy, u->origin() + "/", options_.agent).crawl_delay);
    st.next_allowed = clock_.now() + Seconds(st.delay);
  }
  if (!check_robots(st.policy, url, options_.agent).allowed) {
    PageResponse r;
    r.refused = PageResponse::Refusal::Robots;
    return r;
  }

  clock_.sleep_until(st.next_allowed);
  PageResponse r = inner.fetch(url, timeout);
  st.next_allowed = clock_.now() + Seconds(st.delay);

  if (is_blocked_status(r.status)) {
    if (++st.consecutive_blocked >= options_.circuit_threshold && !st.open) {
      st.open = true;
      spdlog::warn("{}: {} consecutive blocked responses, circuit open", u->host,
                   st.consecutive_blocked);
    }
  } else {
    st.consecutive_blocked = 0;
  }
  return r;
}

}  // namespace cvsstext::scrape
