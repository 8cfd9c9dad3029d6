#pragma once

// NVD JSON 1.1 feed ingestion.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cvsstext/cvss.hpp"
#include "cvsstext/stats.hpp"

namespace cvsstext::nvd {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncodingError : public std::runtime_error {
 public:
  EncodingError(std::string message, std::size_t offset)
      : std::runtime_error(std::move(message)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
  std::string iso() const;  // YYYY-MM-DD
  static std::optional<Date> parse(std::string_view text) noexcept;
  friend auto operator<=>(const Date&, const Date&) = default;
};

struct Reference {
  std::string url;
  std::vector<std::string> tags;
  friend bool operator==(const Reference&, const Reference&) = default;
};

struct VulnEntry {
  std::string cve_id;
  std::string description;
  std::optional<cvss::CvssVector> gt_vector;
  std::optional<double> gt_score;
  std::vector<Reference> references;
  Date published;

  friend bool operator==(const VulnEntry&, const VulnEntry&) = default;
};

/// Counters for records that were read but did not become entries or
/// references, plus ground-truth scores that disagree with our arithmetic.
struct LoadReport {
  std::size_t items = 0;
  std::size_t rejected = 0;             // "** REJECT **" descriptions
  std::size_t dropped_references = 0;   // non-http(s) or unparsable URLs
  std::size_t score_mismatches = 0;     // |computed - gt_score| > 0.1
};

bool is_valid_cve_id(std::string_view id) noexcept;

/// Distinct CVE ids mentioned in free text (case-insensitive, uppercased),
/// in order of first occurrence.
std::vector<std::string> find_cve_ids(std::string_view text);

/// Parses one NVD 1.1 feed document. Throws EncodingError for invalid UTF-8,
/// SchemaError for structural problems and duplicate CVE ids.
std::vector<VulnEntry> load_feed(std::string_view document, LoadReport* report = nullptr);

/// Reads a plain or gzip-compressed feed file.
std::vector<VulnEntry> load_feed_file(const std::filesystem::path& path,
                                      LoadReport* report = nullptr);

/// Loads several feeds concurrently and concatenates them in argument order.
/// Throws SchemaError when a CVE id occurs in more than one feed.
std::vector<VulnEntry> load_feed_files(const std::vector<std::filesystem::path>& paths,
                                       LoadReport* report = nullptr);

/// Entries that carry a v3 ground-truth vector, order preserved.
std::vector<VulnEntry> filter_v3(const std::vector<VulnEntry>& entries);

/// Length statistics over descriptions, counted in Unicode scalars.
CorpusStats description_stats(const std::vector<VulnEntry>& entries,
                              std::size_t bucket_width = 100);

nlohmann::json to_json(const VulnEntry& e);
VulnEntry entry_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, const std::vector<VulnEntry>& entries);
std::vector<VulnEntry> read_jsonl(std::istream& in);

/// Reads a file that may be gzip-compressed into memory.
std::string read_maybe_gzip(const std::filesystem::path& path);

}  // namespace cvsstext::nvd
