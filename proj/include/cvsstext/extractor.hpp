#pragma once

// Declarative per-site text extractors. Each extractor is a JSON document
// (config/extractors/*.json) naming the hosts it serves, how pages are
// rendered, which subtree holds the text for one CVE and which lines to drop.
//
// Modes:
//   page      the whole page covers a single CVE; `cve_scope` (or the root)
//             must mention exactly the job's CVE id.
//   section   the page holds repeated `section` blocks; the block whose ids
//             (from `section_cve`, else its own text) are exactly the job's
//             CVE id is used.
//   sequence  the children of `container` form runs that each start at an
//             `anchor` element; the run whose anchor names exactly the job's
//             CVE id is used.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cvsstext/html.hpp"

namespace cvsstext::scrape {

class ExtractorConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RenderMode { Http, Browser };
enum class ExtractMode { Page, Section, Sequence };

struct ExtractorSpec {
  std::string id;
  std::string site;  // reporting label, e.g. "qualcomm.com"
  std::vector<std::string> hosts;
  RenderMode render = RenderMode::Browser;
  ExtractMode mode = ExtractMode::Page;
  std::vector<std::string> remove;
  std::string root;
  std::string cve_scope;
  std::string section;
  std::string section_cve;
  std::string container;
  std::string anchor;
  bool include_anchor = false;
  std::vector<std::string> text;
  std::vector<std::string> strip_prefixes;
  std::vector<std::string> drop_lines;  // ECMAScript regexes, searched per line
  std::vector<std::string> denylist;    // case-insensitive boilerplate markers
  std::size_t min_length = 32;

  static ExtractorSpec from_json(const nlohmann::json& j);
};

enum class MissReason { NoContent, CveNotFound, MultipleCves, TooShort };
std::string_view to_string(MissReason r) noexcept;

struct ExtractMiss {
  MissReason reason = MissReason::NoContent;
  std::string detail;
};

struct Extraction {
  std::string text;
  std::string anchor;  // the page line naming the CVE id
};

using ExtractResult = std::variant<Extraction, ExtractMiss>;

/// True for lines carrying a CVSS vector; such lines are never emitted since
/// they would leak the label into the text.
bool mentions_cvss_vector(std::string_view line);

class Extractor {
 public:
  explicit Extractor(ExtractorSpec spec);

  const ExtractorSpec& spec() const noexcept { return spec_; }
  ExtractResult extract(std::string_view html, std::string_view cve_id) const;

 private:
  struct Compiled;
  ExtractorSpec spec_;
  std::shared_ptr<const Compiled> c_;
};

class ExtractorRegistry {
 public:
  void add(ExtractorSpec spec);
  /// Loads every *.json file in `dir`, in filename order.
  static ExtractorRegistry load_dir(const std::filesystem::path& dir);

  const Extractor* by_id(std::string_view id) const;
  const Extractor* for_host(std::string_view host) const;
  /// Resolves an extractor id, site label or host name.
  const Extractor* resolve(std::string_view name) const;
  std::vector<std::string> ids() const;
  std::size_t size() const noexcept { return extractors_.size(); }

 private:
  std::vector<std::unique_ptr<Extractor>> extractors_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::map<std::string, std::size_t, std::less<>> by_host_;
};

}  // namespace cvsstext::scrape
