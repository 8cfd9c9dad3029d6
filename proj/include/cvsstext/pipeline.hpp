#pragma once

// Pipeline stages over persisted artifacts. Each stage reads its inputs from
// the artifact paths of a PipelineConfig and writes its outputs there.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace cvsstext::pipeline {

namespace fs = std::filesystem;

enum class Stage { Ingest, AnalyzeRefs, Scrape, BuildDataset, Train, Predict, Evaluate };
inline constexpr Stage kAllStages[] = {Stage::Ingest,       Stage::AnalyzeRefs, Stage::Scrape,
                                       Stage::BuildDataset, Stage::Train,       Stage::Predict,
                                       Stage::Evaluate};

std::string_view to_string(Stage s) noexcept;
std::optional<Stage> stage_from_name(std::string_view name) noexcept;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingArtifact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifact names accepted under "paths" in a config file.
enum class Artifact {
  Entries,         // entries.jsonl
  IngestReport,    // ingest_report.json
  RefsReport,      // refs_report.json
  Scraped,         // scraped.jsonl
  ScrapeMeta,      // scraped_meta.jsonl (fetch timestamps)
  ScrapeFailures,  // scrape_failures.jsonl
  YieldReport,     // yield.json
  Corpus,          // corpus.jsonl
  Manifest,        // manifest.json
  CorpusStats,     // corpus_stats.json
  Models,          // models/
  Predictions,     // predictions.jsonl
  Report,          // report.json
  ReportText,      // report.txt
};

struct PipelineConfig {
  fs::path work_dir = "work";
  std::vector<fs::path> feeds;
  fs::path taxonomy;
  fs::path extractors_dir;
  fs::path rewrite_rules;
  fs::path fixtures_dir;  // set: scrape offline from fixture pages
  std::vector<std::string> browser_command;
  std::vector<std::string> select;

  std::size_t workers = 5;
  double timeout_secs = 20.0;
  std::string agent = "cvsstext-crawler/0.3";
  std::size_t circuit_threshold = 5;

  std::string sources = "all";
  double ratio = 0.75;
  std::uint64_t seed = 7;

  std::size_t top_n = 50;
  std::size_t min_count = 2;

  std::map<Artifact, fs::path> paths;  // overrides of the work_dir defaults

  fs::path path(Artifact a) const;

  /// Relative paths are resolved against `base_dir`. Unknown keys are
  /// rejected so typos do not pass silently.
  static PipelineConfig from_json(const nlohmann::json& j, const fs::path& base_dir);
  static PipelineConfig load(const fs::path& file);

  /// Throws ConfigError for out-of-range knobs.
  void validate() const;
};

/// Runs one stage. Throws MissingArtifact when an input is absent,
/// ConfigError for bad settings, and the stage's own errors otherwise.
void run_stage(Stage stage, const PipelineConfig& config);

}  // namespace cvsstext::pipeline
