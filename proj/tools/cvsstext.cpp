// Command-line entry point: one subcommand per pipeline stage, plus "all".

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cvsstext/eval.hpp"
#include "cvsstext/nvd.hpp"
#include "cvsstext/pipeline.hpp"

namespace fs = std::filesystem;
using namespace cvsstext;
using pipeline::Stage;

namespace {

constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvalidPredictions = 3;

struct Flags {
  std::string config;
  std::string work_dir;
  std::vector<std::string> feeds;
  std::string taxonomy, extractors, rewrite_rules, fixtures_dir, browser_command, agent, sources;
  std::vector<std::string> select;
  std::size_t workers = 0, circuit_threshold = 0, top_n = 0, min_count = 0;
  double timeout = 0, ratio = 0;
  std::uint64_t seed = 0;
  std::string log_level = "info";
};

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

pipeline::PipelineConfig make_config(const Flags& f, const CLI::App& app) {
  auto c = f.config.empty() ? pipeline::PipelineConfig{} : pipeline::PipelineConfig::load(f.config);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--work-dir")) c.work_dir = f.work_dir;
  if (given("--feed")) c.feeds.assign(f.feeds.begin(), f.feeds.end());
  if (given("--taxonomy")) c.taxonomy = f.taxonomy;
  if (given("--extractors")) c.extractors_dir = f.extractors;
  if (given("--rewrite-rules")) c.rewrite_rules = f.rewrite_rules;
  if (given("--fixtures-dir")) c.fixtures_dir = f.fixtures_dir;
  if (given("--browser-command")) c.browser_command = split_words(f.browser_command);
  if (given("--select")) c.select = f.select;
  if (given("--workers")) c.workers = f.workers;
  if (given("--timeout")) c.timeout_secs = f.timeout;
  if (given("--agent")) c.agent = f.agent;
  if (given("--circuit-threshold")) c.circuit_threshold = f.circuit_threshold;
  if (given("--sources")) c.sources = f.sources;
  if (given("--ratio")) c.ratio = f.ratio;
  if (given("--seed")) c.seed = f.seed;
  if (given("--top")) c.top_n = f.top_n;
  if (given("--min-count")) c.min_count = f.min_count;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CVSS text pipeline: NVD ingest, reference scraping, corpus building, "
               "baseline classification and evaluation"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "Pipeline config JSON; flags override it")->check(CLI::ExistingFile);
  app.add_option("--work-dir", f.work_dir, "Directory for stage artifacts (default: work)");
  app.add_option("--feed", f.feeds, "NVD JSON 1.1 feed, optionally gzipped (repeatable)");
  app.add_option("--taxonomy", f.taxonomy, "Domain taxonomy JSON");
  app.add_option("--extractors", f.extractors, "Directory of extractor configs");
  app.add_option("--rewrite-rules", f.rewrite_rules, "URL rewrite rules JSON");
  app.add_option("--fixtures-dir", f.fixtures_dir, "Scrape offline from archived pages");
  app.add_option("--browser-command", f.browser_command,
                 "Headless browser command printing the DOM; {url} is substituted");
  app.add_option("--select", f.select, "Extractor ids, site labels or hosts to crawl (repeatable)");
  app.add_option("--workers", f.workers, "Crawler worker threads");
  app.add_option("--timeout", f.timeout, "Per-page timeout in seconds");
  app.add_option("--agent", f.agent, "Crawler user agent");
  app.add_option("--circuit-threshold", f.circuit_threshold, "Consecutive blocks that stop a host");
  app.add_option("--sources", f.sources, "Corpus sources")->check(CLI::IsMember({"all", "descriptions", "scraped"}));
  app.add_option("--ratio", f.ratio, "Train fraction of texts");
  app.add_option("--seed", f.seed, "Split seed");
  app.add_option("--top", f.top_n, "Domains listed in the reference ranking");
  app.add_option("--min-count", f.min_count, "Minimum token count kept in the vocabulary");
  app.add_option("--log-level", f.log_level, "trace, debug, info, warn, error")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::vector<std::pair<CLI::App*, std::vector<Stage>>> commands;
  const std::pair<Stage, const char*> described[] = {
      {Stage::Ingest, "Load NVD feeds into entries.jsonl"},
      {Stage::AnalyzeRefs, "Rank referenced domains and compute reference statistics"},
      {Stage::Scrape, "Crawl referenced pages and extract texts"},
      {Stage::BuildDataset, "Build the labeled corpus and the grouped split"},
      {Stage::Train, "Fit the eight baseline classifiers"},
      {Stage::Predict, "Predict the test set"},
      {Stage::Evaluate, "Score predictions against ground truth"},
  };
  for (const auto& [stage, help] : described) {
    auto* sub = app.add_subcommand(std::string(pipeline::to_string(stage)), help);
    sub->fallthrough();
    commands.push_back({sub, {stage}});
  }
  auto* all = app.add_subcommand("all", "Run every stage in order");
  all->fallthrough();
  commands.push_back({all, std::vector<Stage>(std::begin(pipeline::kAllStages), std::end(pipeline::kAllStages))});

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("cvsstext");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::from_str(f.log_level));

  try {
    const auto config = make_config(f, app);
    for (const auto& [sub, stages] : commands) {
      if (!sub->parsed()) continue;
      for (const auto stage : stages) {
        pipeline::run_stage(stage, config);
        if (stage == Stage::Evaluate) {
          std::ifstream report(config.path(pipeline::Artifact::ReportText));
          std::cout << report.rdbuf();
        }
      }
    }
  } catch (const pipeline::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const pipeline::MissingArtifact& e) {
    spdlog::error("{}", e.what());
    return kExitConfig;
  } catch (const eval::MissingPrediction& e) {
    spdlog::error("{}", e.what());
    return kExitInvalidPredictions;
  } catch (const eval::UnknownExample& e) {
    spdlog::error("{}", e.what());
    return kExitInvalidPredictions;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return EXIT_SUCCESS;
}
