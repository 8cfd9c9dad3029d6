#pragma once

// Labeled corpus assembly and the grouped train/test split.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvsstext/crawl.hpp"
#include "cvsstext/cvss.hpp"
#include "cvsstext/nvd.hpp"
#include "cvsstext/stats.hpp"

namespace cvsstext::dataset {

enum class SourceKind { NvdDescription, ScrapedReference };

/// text_ref of an example built from the NVD description.
inline constexpr std::string_view kDescriptionRef = "nvd";

struct LabeledExample {
  std::string cve_id;
  std::string text_ref;  // "nvd", or the referenced URL of a scraped text
  std::string text;
  SourceKind source = SourceKind::NvdDescription;
  std::string domain;    // scraped texts only
  cvss::CvssVector labels;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

enum class SourceFilter { All, Descriptions, Scraped };
SourceFilter parse_source_filter(std::string_view s);  // all | descriptions | scraped
std::string_view to_string(SourceFilter f) noexcept;

struct BuildOptions {
  SourceFilter sources = SourceFilter::All;
  bool drop_exact_duplicates = false;  // same CVE, byte-identical text
};

struct BuildReport {
  std::size_t descriptions = 0;
  std::size_t scraped = 0;
  std::size_t orphan_texts = 0;      // scraped CVE id without a v3 ground truth entry
  std::size_t empty_skipped = 0;
  std::size_t duplicates_dropped = 0;
};

/// Entries without a v3 vector contribute nothing. Orphan scraped texts are
/// logged and skipped. Descriptions come first in entry order, then scraped
/// texts in input order.
std::vector<LabeledExample> build_corpus(const std::vector<nvd::VulnEntry>& entries,
                                         const std::vector<scrape::ScrapedText>& scraped,
                                         const BuildOptions& options = {},
                                         BuildReport* report = nullptr);

class EmptyCorpus : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  double ratio = 0.75;
  std::vector<std::string> train;  // sorted CVE ids
  std::vector<std::string> test;
  std::size_t train_texts = 0;
  std::size_t test_texts = 0;

  double train_fraction() const {
    const auto n = train_texts + test_texts;
    return n ? static_cast<double>(train_texts) / n : 0.0;
  }
  bool in_test(const std::string& cve_id) const;
  bool in_train(const std::string& cve_id) const;
};

/// Shuffles the distinct CVE ids (sorted first, so input order does not
/// matter) with a seeded generator and assigns them to train until the
/// train text count reaches ratio * total. The rest go to test.
SplitManifest grouped_split(const std::vector<LabeledExample>& corpus, double ratio,
                            std::uint64_t seed);

/// Seeded Fisher-Yates with rejection sampling, identical on every platform.
void shuffle(std::vector<std::string>& items, std::uint64_t seed);

struct CorpusSummary {
  CorpusStats lengths;  // Unicode scalars per text
  std::array<std::map<char, std::size_t>, 8> label_counts;  // by kComponents index
  std::size_t examples = 0;

  double fraction(cvss::Component c, char value) const;
};

/// Throws EmptyInput.
CorpusSummary corpus_stats(const std::vector<LabeledExample>& corpus);

nlohmann::json to_json(const LabeledExample& e);
LabeledExample example_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SplitManifest& m);
SplitManifest manifest_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CorpusSummary& s);

void write_corpus_jsonl(std::ostream& out, const std::vector<LabeledExample>& corpus);
std::vector<LabeledExample> read_corpus_jsonl(std::istream& in);

}  // namespace cvsstext::dataset
