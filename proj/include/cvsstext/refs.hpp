#pragma once

// Reference analysis: domain frequency ranking, the six-group domain
// taxonomy and reference statistics.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cvsstext/nvd.hpp"

namespace cvsstext::refs {

enum class GroupName { VcsBugTracker, MailingList, Patchnotes, Advisory, ThirdParty, BlogSocial };
enum class Origin { User, Vendor, ThirdParty };

std::string_view to_string(GroupName g) noexcept;
std::string_view to_string(Origin o) noexcept;

/// One of the six reference groups with its usability ratings (1..5).
struct DomainGroup {
  int id = 0;
  GroupName name = GroupName::VcsBugTracker;
  Origin origin = Origin::User;
  int unique_rating = 1;
  int uniform_rating = 1;
  int abstract_text_rating = 1;
};

using GroupSet = std::set<int>;

struct TaxonomyEntry {
  std::string domain;
  GroupSet groups;
  bool available = true;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Versioned taxonomy configuration: the six groups and the known domains.
struct Taxonomy {
  int version = 0;
  std::vector<DomainGroup> groups;  // ordered by id
  std::map<std::string, TaxonomyEntry> domains;

  const DomainGroup* group(int id) const noexcept;

  /// Throws ConfigError on unknown group ids, ratings outside 1..5 or an
  /// id/name mapping that is not a bijection.
  static Taxonomy from_json(const nlohmann::json& j);
  static Taxonomy load(const std::filesystem::path& path);
};

/// Lowercased host without port. Throws InvalidUrl for non-absolute input.
std::string extract_domain(std::string_view url);

/// Exact-hostname lookup; nullopt means Unclassified. Never returns an
/// empty set.
std::optional<GroupSet> classify_domain(std::string_view domain, const Taxonomy& taxonomy);

struct DomainRecord {
  std::string domain;
  std::size_t count = 0;
  std::optional<GroupSet> groups;  // nullopt: unclassified or no taxonomy given
  std::optional<bool> available;
};

/// Reference counts per domain. Partial counts over disjoint entry ranges
/// combine with merge().
class DomainCounts {
 public:
  void add(std::string_view domain, std::size_t n = 1);
  void merge(const DomainCounts& other);
  const std::unordered_map<std::string, std::size_t>& counts() const noexcept {
    return counts_;
  }
  std::size_t total() const noexcept { return total_; }

 private:
  std::unordered_map<std::string, std::size_t> counts_;
  std::size_t total_ = 0;
};

DomainCounts count_domains(std::span<const nvd::VulnEntry> entries);

/// Domains by descending count, ties lexicographic. Throws EmptyInput.
std::vector<DomainRecord> rank_domains(const std::vector<nvd::VulnEntry>& entries,
                                       std::size_t top_n,
                                       const Taxonomy* taxonomy = nullptr);

enum class SocialLink { None, TwitterProfile, TwitterStatus, TwitterOther };

/// URL-pattern tag for Twitter links; profiles and status links are noted
/// but never used as text sources.
SocialLink tag_social_link(std::string_view url);

struct RefStats {
  std::size_t entries = 0;
  std::size_t total_refs = 0;
  std::size_t per_cve_median = 0;
  std::size_t per_cve_p95 = 0;
  std::size_t distinct_domains = 0;
  double top50_share = 0.0;  // 0 when there are no references
  std::size_t twitter_profile_links = 0;
  std::size_t twitter_status_links = 0;
};

/// Throws EmptyInput.
RefStats reference_stats(const std::vector<nvd::VulnEntry>& entries);

/// reference_stats computed separately for each publication year.
std::map<int, RefStats> reference_stats_by_year(const std::vector<nvd::VulnEntry>& entries);

nlohmann::json to_json(const RefStats& s);
nlohmann::json to_json(const DomainRecord& r);

/// Human-readable ranking table.
void print_ranking(std::ostream& out, const std::vector<DomainRecord>& ranking,
                   const Taxonomy* taxonomy);

}  // namespace cvsstext::refs
