#include "cvsstext/refs.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>

#include <spdlog/spdlog.h>

#include "cvsstext/url.hpp"

namespace cvsstext::refs {

using nlohmann::json;

std::string_view to_string(GroupName g) noexcept {
  switch (g) {
    case GroupName::VcsBugTracker: return "VcsBugTracker";
    case GroupName::MailingList: return "MailingList";
    case GroupName::Patchnotes: return "Patchnotes";
    case GroupName::Advisory: return "Advisory";
    case GroupName::ThirdParty: return "ThirdParty";
    case GroupName::BlogSocial: return "BlogSocial";
  }
  return "?";
}

std::string_view to_string(Origin o) noexcept {
  switch (o) {
    case Origin::User: return "User";
    case Origin::Vendor: return "Vendor";
    case Origin::ThirdParty: return "ThirdParty";
  }
  return "?";
}

namespace {

template <typename E, std::size_t N>
E enum_from(std::string_view s, const std::array<E, N>& all, const char* what) {
  for (E e : all) {
    if (to_string(e) == s) return e;
  }
  throw ConfigError(std::string("taxonomy: unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<GroupName, 6> kGroupNames = {
    GroupName::VcsBugTracker, GroupName::MailingList, GroupName::Patchnotes,
    GroupName::Advisory,      GroupName::ThirdParty,  GroupName::BlogSocial};
constexpr std::array<Origin, 3> kOrigins = {Origin::User, Origin::Vendor, Origin::ThirdParty};

int rating(const json& g, const char* key) {
  const int r = g.at(key).get<int>();
  if (r < 1 || r > 5) {
    throw ConfigError(std::string("taxonomy: rating '") + key + "' outside 1..5");
  }
  return r;
}

}  // namespace

const DomainGroup* Taxonomy::group(int id) const noexcept {
  for (const auto& g : groups) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

Taxonomy Taxonomy::from_json(const json& j) {
  try {
    Taxonomy t;
    t.version = j.at("version").get<int>();
    std::set<int> ids;
    std::set<GroupName> names;
    for (const auto& g : j.at("groups")) {
      DomainGroup dg;
      dg.id = g.at("id").get<int>();
      dg.name = enum_from(g.at("name").get<std::string>(), kGroupNames, "group name");
      dg.origin = enum_from(g.at("origin").get<std::string>(), kOrigins, "origin");
      dg.unique_rating = rating(g, "unique");
      dg.uniform_rating = rating(g, "uniform");
      dg.abstract_text_rating = rating(g, "abstract_text");
      if (dg.id < 1 || dg.id > 6) throw ConfigError("taxonomy: group id outside 1..6");
      if (!ids.insert(dg.id).second || !names.insert(dg.name).second) {
        throw ConfigError("taxonomy: group ids and names must be a bijection");
      }
      t.groups.push_back(dg);
    }
    std::sort(t.groups.begin(), t.groups.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& d : j.at("domains")) {
      TaxonomyEntry e;
      e.domain = d.at("domain").get<std::string>();
      for (int gid : d.at("groups").get<std::vector<int>>()) {
        if (!ids.contains(gid)) {
          throw ConfigError("taxonomy: domain " + e.domain + " names unknown group " +
                            std::to_string(gid));
        }
        e.groups.insert(gid);
      }
      if (e.groups.empty()) throw ConfigError("taxonomy: domain " + e.domain + " has no group");
      e.available = d.value("available", true);
      if (!t.domains.emplace(e.domain, e).second) {
        throw ConfigError("taxonomy: duplicate domain " + e.domain);
      }
    }
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("taxonomy: ") + e.what());
  }
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string extract_domain(std::string_view url) { return Url::parse(url).host; }

std::optional<GroupSet> classify_domain(std::string_view domain, const Taxonomy& taxonomy) {
  const auto it = taxonomy.domains.find(std::string(domain));
  if (it == taxonomy.domains.end() || it->second.groups.empty()) return std::nullopt;
  return it->second.groups;
}

void DomainCounts::add(std::string_view domain, std::size_t n) {
  counts_[std::string(domain)] += n;
  total_ += n;
}

void DomainCounts::merge(const DomainCounts& other) {
  for (const auto& [d, n] : other.counts_) counts_[d] += n;
  total_ += other.total_;
}

DomainCounts count_domains(std::span<const nvd::VulnEntry> entries) {
  constexpr std::size_t kChunk = 20000;
  auto count_range = [](std::span<const nvd::VulnEntry> part) {
    DomainCounts c;
    for (const auto& e : part) {
      for (const auto& r : e.references) {
        const auto u = Url::try_parse(r.url);
        if (!u) {
          spdlog::warn("{}: skipping unparsable reference '{}'", e.cve_id, r.url);
          continue;
        }
        c.add(u->host);
      }
    }
    return c;
  };
  if (entries.size() <= kChunk) return count_range(entries);

  std::vector<std::future<DomainCounts>> parts;
  for (std::size_t off = 0; off < entries.size(); off += kChunk) {
    parts.push_back(std::async(std::launch::async, count_range,
                               entries.subspan(off, std::min(kChunk, entries.size() - off))));
  }
  DomainCounts total;
  for (auto& p : parts) total.merge(p.get());
  return total;
}

namespace {

std::vector<std::pair<std::string, std::size_t>> sorted_counts(const DomainCounts& counts) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.counts().begin(),
                                                     counts.counts().end());
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return v;
}

}  // namespace

std::vector<DomainRecord> rank_domains(const std::vector<nvd::VulnEntry>& entries,
                                       std::size_t top_n, const Taxonomy* taxonomy) {
  if (entries.empty()) throw EmptyInput("rank_domains: no entries");
  if (top_n == 0) throw std::invalid_argument("rank_domains: top_n must be >= 1");
  const auto sorted = sorted_counts(count_domains(entries));
  std::vector<DomainRecord> out;
  for (std::size_t k = 0; k < sorted.size() && k < top_n; ++k) {
    DomainRecord r{sorted[k].first, sorted[k].second, std::nullopt, std::nullopt};
    if (taxonomy) {
      r.groups = classify_domain(r.domain, *taxonomy);
      if (const auto it = taxonomy->domains.find(r.domain); it != taxonomy->domains.end()) {
        r.available = it->second.available;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

SocialLink tag_social_link(std::string_view url) {
  const auto u = Url::try_parse(url);
  if (!u) return SocialLink::None;
  const std::string& h = u->host;
  if (h != "twitter.com" && h != "www.twitter.com" && h != "mobile.twitter.com" &&
      h != "x.com" && h != "www.x.com") {
    return SocialLink::None;
  }
  std::vector<std::string_view> segs;
  std::string_view p = u->path;
  while (!p.empty()) {
    const auto start = p.find_first_not_of('/');
    if (start == std::string_view::npos) break;
    p.remove_prefix(start);
    const auto end = p.find('/');
    segs.push_back(p.substr(0, end));
    p = end == std::string_view::npos ? std::string_view{} : p.substr(end);
  }
  if (segs.size() >= 3 && segs[1] == "status") return SocialLink::TwitterStatus;
  static constexpr std::array<std::string_view, 8> kReserved = {
      "search", "hashtag", "i", "intent", "home", "share", "explore", "settings"};
  if (segs.size() == 1 &&
      std::find(kReserved.begin(), kReserved.end(), segs[0]) == kReserved.end()) {
    return SocialLink::TwitterProfile;
  }
  return SocialLink::TwitterOther;
}

RefStats reference_stats(const std::vector<nvd::VulnEntry>& entries) {
  if (entries.empty()) throw EmptyInput("reference_stats: no entries");
  RefStats s;
  s.entries = entries.size();
  std::vector<std::size_t> per_cve;
  per_cve.reserve(entries.size());
  for (const auto& e : entries) {
    per_cve.push_back(e.references.size());
    for (const auto& r : e.references) {
      switch (tag_social_link(r.url)) {
        case SocialLink::TwitterProfile: ++s.twitter_profile_links; break;
        case SocialLink::TwitterStatus: ++s.twitter_status_links; break;
        default: break;
      }
    }
  }
  std::sort(per_cve.begin(), per_cve.end());
  s.per_cve_median = lower_median(per_cve);
  s.per_cve_p95 = nearest_rank(per_cve, 95.0);

  const DomainCounts counts = count_domains(entries);
  s.total_refs = counts.total();
  s.distinct_domains = counts.counts().size();
  if (s.total_refs > 0) {
    const auto sorted = sorted_counts(counts);
    std::size_t top = 0;
    for (std::size_t k = 0; k < sorted.size() && k < 50; ++k) top += sorted[k].second;
    s.top50_share = static_cast<double>(top) / static_cast<double>(s.total_refs);
  }
  return s;
}

std::map<int, RefStats> reference_stats_by_year(const std::vector<nvd::VulnEntry>& entries) {
  std::map<int, std::vector<nvd::VulnEntry>> by_year;
  for (const auto& e : entries) by_year[e.published.year].push_back(e);
  std::map<int, RefStats> out;
  for (const auto& [year, part] : by_year) out.emplace(year, reference_stats(part));
  return out;
}

json to_json(const RefStats& s) {
  return json{{"entries", s.entries},
              {"total_refs", s.total_refs},
              {"per_cve_median", s.per_cve_median},
              {"per_cve_p95", s.per_cve_p95},
              {"distinct_domains", s.distinct_domains},
              {"top50_share", s.top50_share},
              {"twitter_profile_links", s.twitter_profile_links},
              {"twitter_status_links", s.twitter_status_links}};
}

json to_json(const DomainRecord& r) {
  json j{{"domain", r.domain}, {"count", r.count}};
  j["groups"] = r.groups ? json(std::vector<int>(r.groups->begin(), r.groups->end()))
                         : json("Unclassified");
  j["available"] = r.available ? json(*r.available) : json(nullptr);
  return j;
}

void print_ranking(std::ostream& out, const std::vector<DomainRecord>& ranking,
                   const Taxonomy* taxonomy) {
  out << std::left << std::setw(5) << "#" << std::setw(34) << "Domain" << std::right
      << std::setw(9) << "Num." << "  " << std::left << std::setw(8) << "Gr."
      << "Avail.\n";
  std::size_t rank = 0;
  for (const auto& r : ranking) {
    std::string groups = "-";
    if (r.groups) {
      groups.clear();
      for (int g : *r.groups) groups += (groups.empty() ? "" : "/") + std::to_string(g);
    }
    const char* avail = !r.available ? "?" : (*r.available ? "yes" : "no");
    out << std::left << std::setw(5) << ++rank << std::setw(34) << r.domain << std::right
        << std::setw(9) << r.count << "  " << std::left << std::setw(8) << groups << avail
        << '\n';
  }
  if (taxonomy) {
    out << "\nGroup  Name            Origin      Unique Uniform AbsText\n";
    for (const auto& g : taxonomy->groups) {
      out << std::left << std::setw(7) << g.id << std::setw(16) << to_string(g.name)
          << std::setw(12) << to_string(g.origin) << std::setw(7) << g.unique_rating
          << std::setw(8) << g.uniform_rating << g.abstract_text_rating << '\n';
    }
  }
}

}  // namespace cvsstext::refs
