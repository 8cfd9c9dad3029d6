#include "cvsstext/robots.hpp"

#include <charconv>
#include <cmath>

#include <spdlog/spdlog.h>

#include "cvsstext/text.hpp"
#include "cvsstext/url.hpp"

namespace cvsstext::scrape {

namespace {

std::string_view strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_delay(std::string_view v) {
  double d = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(d) ||
      d < 0.0) {
    return std::nullopt;
  }
  return d;
}

}  // namespace

RobotsPolicy RobotsPolicy::parse(std::string_view body) {
  RobotsPolicy policy;
  Group current;
  bool in_agents = false;  // consecutive User-agent lines share one group
  auto flush = [&] {
    if (!current.agents.empty()) policy.groups_.push_back(std::move(current));
    current = Group{};
  };

  std::size_t lineno = 0;
  while (!body.empty()) {
    const auto nl = body.find('\n');
    std::string_view line = body.substr(0, nl);
    body = nl == std::string_view::npos ? std::string_view{} : body.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = strip(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      spdlog::debug("robots.txt line {} ignored: no directive", lineno);
      continue;
    }
    const std::string key = text::to_lower_ascii(strip(line.substr(0, colon)));
    const std::string_view value = strip(line.substr(colon + 1));

    if (key == "user-agent") {
      if (!in_agents) flush();
      in_agents = true;
      current.agents.push_back(text::to_lower_ascii(value));
      continue;
    }
    in_agents = false;
    if (current.agents.empty()) continue;  // rules before any User-agent
    if (key == "disallow" || key == "allow") {
      // An empty Disallow allows everything; it contributes no rule.
      if (value.empty()) continue;
      current.rules.push_back(Rule{key == "allow", std::string(value)});
    } else if (key == "crawl-delay") {
      if (auto d = parse_delay(value)) {
        current.crawl_delay = d;
      } else {
        spdlog::warn("robots.txt line {}: ignoring invalid crawl-delay '{}'", lineno, value);
      }
    }
  }
  flush();
  return policy;
}

const RobotsPolicy::Group* RobotsPolicy::group_for(std::string_view agent) const noexcept {
  const std::string ua = text::to_lower_ascii(agent);
  // Product token: text before the first '/' or space.
  const std::string token = ua.substr(0, ua.find_first_of("/ "));
  const Group* best = nullptr;
  std::size_t best_len = 0;
  const Group* star = nullptr;
  for (const auto& g : groups_) {
    for (const auto& a : g.agents) {
      if (a == "*") {
        if (!star) star = &g;
      } else if (!a.empty() && token.find(a) != std::string::npos && a.size() > best_len) {
        best = &g;
        best_len = a.size();
      }
    }
  }
  return best ? best : star;
}

bool robots_pattern_matches(std::string_view pattern, std::string_view path) noexcept {
  bool anchored = false;
  if (!pattern.empty() && pattern.back() == '$') {
    anchored = true;
    pattern.remove_suffix(1);
  }
  // Iterative wildcard matching with backtracking over the last '*'.
  std::size_t p = 0, s = 0;
  std::size_t star_p = std::string_view::npos, star_s = 0;
  while (true) {
    if (p == pattern.size()) {
      if (!anchored || s == path.size()) return true;
    } else if (pattern[p] == '*') {
      star_p = p++;
      star_s = s;
      continue;
    } else if (s < path.size() && pattern[p] == path[s]) {
      ++p, ++s;
      continue;
    }
    if (star_p == std::string_view::npos || star_s >= path.size()) return false;
    p = star_p + 1;
    s = ++star_s;
  }
}

RobotsDecision check_robots(const RobotsPolicy& policy, std::string_view url,
                            std::string_view agent) {
  RobotsDecision d;
  const auto* group = policy.group_for(agent);
  if (!group) return d;
  d.crawl_delay = group->crawl_delay.value_or(0.0);

  const auto u = Url::try_parse(url);
  const std::string path = u ? u->path_and_query() : std::string(url);
  std::size_t best_len = 0;
  bool matched = false;
  for (const auto& r : group->rules) {
    if (!robots_pattern_matches(r.pattern, path)) continue;
    const std::size_t len = r.pattern.size();
    if (!matched || len > best_len || (len == best_len && r.allow && !d.allowed)) {
      d.allowed = r.allow;
      best_len = len;
      matched = true;
    }
  }
  return d;
}

}  // namespace cvsstext::scrape
