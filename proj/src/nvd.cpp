#include "cvsstext/nvd.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <future>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "cvsstext/text.hpp"
#include "cvsstext/url.hpp"

namespace cvsstext::nvd {

using nlohmann::json;

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> Date::parse(std::string_view text) noexcept {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> int {
    int v = 0;
    for (std::size_t k = pos; k < pos + len; ++k) {
      if (text[k] < '0' || text[k] > '9') return -1;
      v = v * 10 + (text[k] - '0');
    }
    return v;
  };
  Date d{num(0, 4), num(5, 2), num(8, 2)};
  if (d.year < 0 || d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31) {
    return std::nullopt;
  }
  return d;
}

bool is_valid_cve_id(std::string_view id) noexcept {
  if (id.size() < 13 || !id.starts_with("CVE-") || id[8] != '-') return false;
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
      return c >= '0' && c <= '9';
    });
  };
  return digits(id.substr(4, 4)) && digits(id.substr(9)) && id.size() - 9 >= 4;
}

std::vector<std::string> find_cve_ids(std::string_view text) {
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  auto upper = [](char c) { return c >= 'a' && c <= 'z' ? static_cast<char>(c - 32) : c; };
  std::vector<std::string> out;
  for (std::size_t i = 0; i + 13 <= text.size(); ++i) {
    if (upper(text[i]) != 'C' || upper(text[i + 1]) != 'V' || upper(text[i + 2]) != 'E' ||
        (text[i + 3] != '-' && text[i + 3] != '_')) {
      continue;
    }
    if (i > 0 && std::isalnum(static_cast<unsigned char>(text[i - 1]))) continue;
    std::size_t j = i + 4;
    std::size_t y = 0;
    while (j < text.size() && is_digit(text[j]) && y < 5) ++j, ++y;
    if (y != 4 || j >= text.size() || (text[j] != '-' && text[j] != '_')) continue;
    const std::size_t seq_start = ++j;
    while (j < text.size() && is_digit(text[j])) ++j;
    if (j - seq_start < 4) continue;
    std::string id = "CVE-";
    id.append(text.substr(i + 4, 4));
    id += '-';
    id.append(text.substr(seq_start, j - seq_start));
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
    i = j - 1;
  }
  return out;
}

namespace {

const json& require(const json& obj, const char* key, std::string_view context) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw SchemaError(std::string(context) + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

const std::string& require_string(const json& obj, const char* key,
                                  std::string_view context) {
  const json& v = require(obj, key, context);
  if (!v.is_string()) {
    throw SchemaError(std::string(context) + ": field '" + key + "' is not a string");
  }
  return v.get_ref<const std::string&>();
}

struct V3Candidate {
  std::string version;
  std::string vector;
  std::optional<double> score;
};

void collect_v3(const json& node, std::vector<V3Candidate>& out) {
  if (node.is_array()) {
    for (const auto& n : node) collect_v3(n, out);
    return;
  }
  if (!node.is_object() || !node.contains("cvssV3")) return;
  const json& c = node.at("cvssV3");
  if (!c.is_object() || !c.contains("vectorString") || !c.at("vectorString").is_string()) {
    return;
  }
  V3Candidate cand;
  cand.vector = c.at("vectorString").get<std::string>();
  if (c.contains("version") && c.at("version").is_string()) {
    cand.version = c.at("version").get<std::string>();
  } else if (cand.vector.starts_with("CVSS:3.1/")) {
    cand.version = "3.1";
  } else {
    cand.version = "3.0";
  }
  if (c.contains("baseScore") && c.at("baseScore").is_number()) {
    cand.score = c.at("baseScore").get<double>();
  }
  out.push_back(std::move(cand));
}

std::optional<VulnEntry> parse_item(const json& item, std::size_t index,
                                    LoadReport& report) {
  const std::string ctx = "CVE_Items[" + std::to_string(index) + "]";
  const json& cve = require(item, "cve", ctx);
  const std::string& id = require_string(require(cve, "CVE_data_meta", ctx), "ID", ctx);
  if (!is_valid_cve_id(id)) throw SchemaError(ctx + ": malformed CVE id '" + id + "'");

  const json& descs = require(require(cve, "description", ctx), "description_data", ctx);
  if (!descs.is_array() || descs.empty()) {
    throw SchemaError(ctx + " (" + id + "): empty description list");
  }
  const std::string* description = nullptr;
  for (const auto& d : descs) {
    if (d.is_object() && d.value("lang", "") == "en" && d.contains("value") &&
        d.at("value").is_string()) {
      description = &d.at("value").get_ref<const std::string&>();
      break;
    }
  }
  if (description == nullptr) {
    throw SchemaError(ctx + " (" + id + "): no English description");
  }
  if (description->starts_with("** REJECT **")) {
    ++report.rejected;
    return std::nullopt;
  }

  VulnEntry e;
  e.cve_id = id;
  e.description = *description;

  if (cve.contains("references")) {
    const json& refs = require(cve.at("references"), "reference_data", ctx);
    if (!refs.is_array()) throw SchemaError(ctx + ": reference_data is not an array");
    for (const auto& r : refs) {
      const std::string& url = require_string(r, "url", ctx + ".references");
      const auto parsed = Url::try_parse(url);
      if (!parsed || !is_http_scheme(*parsed)) {
        ++report.dropped_references;
        spdlog::debug("{}: dropping non-http reference '{}'", id, url);
        continue;
      }
      Reference ref{url, {}};
      if (r.contains("tags") && r.at("tags").is_array()) {
        for (const auto& t : r.at("tags")) {
          if (t.is_string()) ref.tags.push_back(t.get<std::string>());
        }
      }
      e.references.push_back(std::move(ref));
    }
  }

  const std::string& published = require_string(item, "publishedDate", ctx);
  const auto date = Date::parse(published);
  if (!date) throw SchemaError(ctx + " (" + id + "): bad publishedDate '" + published + "'");
  e.published = *date;

  if (item.contains("impact")) {
    std::vector<V3Candidate> cands;
    const json& impact = item.at("impact");
    for (const char* key : {"baseMetricV3", "baseMetricV31", "baseMetricV30"}) {
      if (impact.is_object() && impact.contains(key)) collect_v3(impact.at(key), cands);
    }
    // Highest version wins; "3.1" > "3.0".
    std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return a.version > b.version;
    });
    if (!cands.empty()) {
      try {
        e.gt_vector = cvss::parse_vector(cands.front().vector);
      } catch (const cvss::VectorError& err) {
        throw SchemaError(ctx + " (" + id + "): " + err.what());
      }
      e.gt_score = cands.front().score;
      if (e.gt_score) {
        const double computed = cvss::compute_base_score(*e.gt_vector).base_score;
        if (std::abs(computed - *e.gt_score) > 0.1 + 1e-9) {
          ++report.score_mismatches;
          spdlog::warn("{}: feed score {} differs from computed {}", id, *e.gt_score,
                       computed);
        }
      }
    }
  }
  return e;
}

}  // namespace

std::vector<VulnEntry> load_feed(std::string_view document, LoadReport* report) {
  if (const auto bad = text::find_invalid_utf8(document)) {
    throw EncodingError("invalid UTF-8 at byte " + std::to_string(*bad), *bad);
  }
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("feed is not valid JSON: ") + e.what());
  }
  const json& items = require(doc, "CVE_Items", "feed");
  if (!items.is_array()) throw SchemaError("feed: CVE_Items is not an array");

  LoadReport local;
  std::vector<VulnEntry> out;
  out.reserve(items.size());
  std::unordered_set<std::string> seen;
  for (std::size_t k = 0; k < items.size(); ++k) {
    ++local.items;
    auto entry = parse_item(items[k], k, local);
    if (!entry) continue;
    if (!seen.insert(entry->cve_id).second) {
      throw SchemaError("feed: duplicate CVE id " + entry->cve_id);
    }
    out.push_back(std::move(*entry));
  }
  if (report) {
    report->items += local.items;
    report->rejected += local.rejected;
    report->dropped_references += local.dropped_references;
    report->score_mismatches += local.score_mismatches;
  }
  return out;
}

std::string read_maybe_gzip(const std::filesystem::path& path) {
  // gzread passes uncompressed files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw std::runtime_error("cannot open " + path.string());
  std::string data;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) data.append(buf, static_cast<std::size_t>(n));
  int errnum = 0;
  const char* msg = gzerror(f, &errnum);
  const std::string err = (n < 0 && msg) ? msg : "";
  gzclose(f);
  if (n < 0) throw std::runtime_error("read error in " + path.string() + ": " + err);
  return data;
}

std::vector<VulnEntry> load_feed_file(const std::filesystem::path& path,
                                      LoadReport* report) {
  const std::string data = read_maybe_gzip(path);
  try {
    return load_feed(data, report);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  } catch (const EncodingError& e) {
    throw EncodingError(path.string() + ": " + e.what(), e.offset());
  }
}

std::vector<VulnEntry> load_feed_files(const std::vector<std::filesystem::path>& paths,
                                       LoadReport* report) {
  std::vector<std::future<std::pair<std::vector<VulnEntry>, LoadReport>>> parts;
  parts.reserve(paths.size());
  for (const auto& p : paths) {
    parts.push_back(std::async(std::launch::async, [p] {
      LoadReport r;
      auto entries = load_feed_file(p, &r);
      return std::make_pair(std::move(entries), r);
    }));
  }
  std::vector<VulnEntry> out;
  std::unordered_set<std::string> seen;
  for (auto& part : parts) {
    auto [entries, r] = part.get();
    if (report) {
      report->items += r.items;
      report->rejected += r.rejected;
      report->dropped_references += r.dropped_references;
      report->score_mismatches += r.score_mismatches;
    }
    for (auto& e : entries) {
      if (!seen.insert(e.cve_id).second) {
        throw SchemaError("duplicate CVE id across feeds: " + e.cve_id);
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<VulnEntry> filter_v3(const std::vector<VulnEntry>& entries) {
  std::vector<VulnEntry> out;
  for (const auto& e : entries) {
    if (e.gt_vector) out.push_back(e);
  }
  return out;
}

CorpusStats description_stats(const std::vector<VulnEntry>& entries,
                              std::size_t bucket_width) {
  if (entries.empty()) throw EmptyInput("description_stats: no entries");
  std::vector<std::size_t> lengths;
  lengths.reserve(entries.size());
  for (const auto& e : entries) lengths.push_back(text::scalar_count(e.description));
  return length_stats(lengths, bucket_width);
}

json to_json(const VulnEntry& e) {
  json refs = json::array();
  for (const auto& r : e.references) refs.push_back({{"url", r.url}, {"tags", r.tags}});
  return json{
      {"cve_id", e.cve_id},
      {"description", e.description},
      {"vector", e.gt_vector ? json(cvss::to_string(*e.gt_vector)) : json(nullptr)},
      {"score", e.gt_score ? json(*e.gt_score) : json(nullptr)},
      {"references", std::move(refs)},
      {"published", e.published.iso()},
  };
}

VulnEntry entry_from_json(const json& j) {
  VulnEntry e;
  e.cve_id = require_string(j, "cve_id", "entry");
  if (!is_valid_cve_id(e.cve_id)) throw SchemaError("entry: malformed CVE id " + e.cve_id);
  e.description = require_string(j, "description", e.cve_id);
  const json& vec = require(j, "vector", e.cve_id);
  if (!vec.is_null()) e.gt_vector = cvss::parse_vector(vec.get<std::string>());
  if (j.contains("score") && !j.at("score").is_null()) e.gt_score = j.at("score").get<double>();
  for (const auto& r : require(j, "references", e.cve_id)) {
    Reference ref{r.at("url").get<std::string>(), {}};
    if (r.contains("tags")) ref.tags = r.at("tags").get<std::vector<std::string>>();
    e.references.push_back(std::move(ref));
  }
  const auto date = Date::parse(require_string(j, "published", e.cve_id));
  if (!date) throw SchemaError(e.cve_id + ": bad published date");
  e.published = *date;
  return e;
}

void write_jsonl(std::ostream& out, const std::vector<VulnEntry>& entries) {
  for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

std::vector<VulnEntry> read_jsonl(std::istream& in) {
  std::vector<VulnEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(entry_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw SchemaError("entries line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cvsstext::nvd
