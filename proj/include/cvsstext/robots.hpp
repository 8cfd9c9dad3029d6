#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cvsstext::scrape {

/// Parsed robots.txt. An absent or unparsable file yields the permissive
/// policy (no groups).
class RobotsPolicy {
 public:
  struct Rule {
    bool allow = false;
    std::string pattern;  // may contain '*' and a trailing '$'
  };
  struct Group {
    std::vector<std::string> agents;  // lowercased product tokens, "*" included
    std::vector<Rule> rules;
    std::optional<double> crawl_delay;
  };

  RobotsPolicy() = default;
  static RobotsPolicy parse(std::string_view body);
  static RobotsPolicy permissive() { return {}; }

  const std::vector<Group>& groups() const noexcept { return groups_; }

  /// The group governing `agent`: the longest matching agent token, falling
  /// back to "*". nullptr when no group applies.
  const Group* group_for(std::string_view agent) const noexcept;

 private:
  std::vector<Group> groups_;
};

struct RobotsDecision {
  bool allowed = true;
  double crawl_delay = 0.0;  // seconds; meaningful when allowed
};

/// Longest-match rule decides; on equal length Allow wins. Crawl-delay of
/// the governing group, 0 when unspecified.
RobotsDecision check_robots(const RobotsPolicy& policy, std::string_view url,
                            std::string_view agent);

/// Robots-style wildcard match of `pattern` against the start of `path`.
bool robots_pattern_matches(std::string_view pattern, std::string_view path) noexcept;

}  // namespace cvsstext::scrape
