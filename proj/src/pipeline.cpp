#include "cvsstext/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cvsstext/baseline.hpp"
#include "cvsstext/crawl.hpp"
#include "cvsstext/dataset.hpp"
#include "cvsstext/eval.hpp"
#include "cvsstext/nvd.hpp"
#include "cvsstext/refs.hpp"

namespace cvsstext::pipeline {

using nlohmann::json;

namespace {

struct ArtifactInfo {
  Artifact artifact;
  std::string_view key;
  std::string_view file;
};

constexpr ArtifactInfo kArtifacts[] = {
    {Artifact::Entries, "entries", "entries.jsonl"},
    {Artifact::IngestReport, "ingest_report", "ingest_report.json"},
    {Artifact::RefsReport, "refs_report", "refs_report.json"},
    {Artifact::Scraped, "scraped", "scraped.jsonl"},
    {Artifact::ScrapeMeta, "scrape_meta", "scraped_meta.jsonl"},
    {Artifact::ScrapeFailures, "scrape_failures", "scrape_failures.jsonl"},
    {Artifact::YieldReport, "yield", "yield.json"},
    {Artifact::Corpus, "corpus", "corpus.jsonl"},
    {Artifact::Manifest, "manifest", "manifest.json"},
    {Artifact::CorpusStats, "corpus_stats", "corpus_stats.json"},
    {Artifact::Models, "models", "models"},
    {Artifact::Predictions, "predictions", "predictions.jsonl"},
    {Artifact::Report, "report", "report.json"},
    {Artifact::ReportText, "report_text", "report.txt"},
};

const ArtifactInfo& info(Artifact a) {
  for (const auto& i : kArtifacts) {
    if (i.artifact == a) return i;
  }
  throw std::logic_error("unregistered artifact");
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

}  // namespace

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::AnalyzeRefs: return "analyze-refs";
    case Stage::Scrape: return "scrape";
    case Stage::BuildDataset: return "build-dataset";
    case Stage::Train: return "train";
    case Stage::Predict: return "predict";
    case Stage::Evaluate: return "evaluate";
  }
  return "?";
}

std::optional<Stage> stage_from_name(std::string_view name) noexcept {
  for (const auto s : kAllStages) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

fs::path PipelineConfig::path(Artifact a) const {
  if (const auto it = paths.find(a); it != paths.end()) return it->second;
  return work_dir / std::string(info(a).file);
}

PipelineConfig PipelineConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "work_dir", "feeds",  "taxonomy", "extractors_dir", "rewrite_rules", "fixtures_dir",
      "browser_command", "select", "scraper", "split", "refs", "baseline", "paths"};
  auto check_keys = [](const json& obj, const std::set<std::string>& allowed, std::string_view where) {
    if (!obj.is_object()) throw ConfigError(fmt::format("'{}' must be an object", where));
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) throw ConfigError(fmt::format("unknown config key '{}' in {}", k, where));
    }
  };
  check_keys(j, kKeys, "config");

  PipelineConfig c;
  try {
    auto get_path = [&](const char* key, fs::path& out) {
      if (j.contains(key)) out = resolve(base_dir, j.at(key).get<std::string>());
    };
    c.work_dir = resolve(base_dir, c.work_dir);
    get_path("work_dir", c.work_dir);
    get_path("taxonomy", c.taxonomy);
    get_path("extractors_dir", c.extractors_dir);
    get_path("rewrite_rules", c.rewrite_rules);
    get_path("fixtures_dir", c.fixtures_dir);
    if (j.contains("feeds")) {
      for (const auto& f : j.at("feeds")) c.feeds.push_back(resolve(base_dir, f.get<std::string>()));
    }
    if (j.contains("browser_command")) c.browser_command = j.at("browser_command").get<std::vector<std::string>>();
    if (j.contains("select")) c.select = j.at("select").get<std::vector<std::string>>();
    if (j.contains("scraper")) {
      const auto& s = j.at("scraper");
      check_keys(s, {"workers", "timeout_secs", "agent", "circuit_threshold"}, "scraper");
      c.workers = s.value("workers", c.workers);
      c.timeout_secs = s.value("timeout_secs", c.timeout_secs);
      c.agent = s.value("agent", c.agent);
      c.circuit_threshold = s.value("circuit_threshold", c.circuit_threshold);
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      check_keys(s, {"ratio", "seed", "sources"}, "split");
      c.ratio = s.value("ratio", c.ratio);
      c.seed = s.value("seed", c.seed);
      c.sources = s.value("sources", c.sources);
    }
    if (j.contains("refs")) {
      check_keys(j.at("refs"), {"top_n"}, "refs");
      c.top_n = j.at("refs").value("top_n", c.top_n);
    }
    if (j.contains("baseline")) {
      check_keys(j.at("baseline"), {"min_count"}, "baseline");
      c.min_count = j.at("baseline").value("min_count", c.min_count);
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      if (!p.is_object()) throw ConfigError("'paths' must be an object");
      for (const auto& [k, v] : p.items()) {
        const ArtifactInfo* found = nullptr;
        for (const auto& i : kArtifacts) {
          if (i.key == k) found = &i;
        }
        if (!found) throw ConfigError(fmt::format("unknown artifact '{}' in paths", k));
        c.paths[found->artifact] = resolve(base_dir, v.get<std::string>());
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

void PipelineConfig::validate() const {
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  if (!(timeout_secs > 0.0)) throw ConfigError("timeout must be positive");
  if (circuit_threshold < 1) throw ConfigError("circuit threshold must be at least 1");
  if (top_n < 1) throw ConfigError("top_n must be at least 1");
  try {
    dataset::parse_source_filter(sources);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

void require(const fs::path& p, std::string_view what, Stage stage) {
  if (p.empty()) throw ConfigError(fmt::format("{}: no {} configured", to_string(stage), what));
  if (!fs::exists(p)) {
    throw MissingArtifact(fmt::format("{}: {} not found at {}", to_string(stage), what, p.string()));
  }
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_json(const fs::path& p, const json& j) {
  auto out = open_out(p);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<nvd::VulnEntry> read_entries(const PipelineConfig& c, Stage stage) {
  const auto p = c.path(Artifact::Entries);
  require(p, "entries", stage);
  std::ifstream in(p);
  return nvd::read_jsonl(in);
}

std::vector<dataset::LabeledExample> read_corpus(const PipelineConfig& c, Stage stage) {
  const auto p = c.path(Artifact::Corpus);
  require(p, "corpus", stage);
  std::ifstream in(p);
  return dataset::read_corpus_jsonl(in);
}

dataset::SplitManifest read_manifest(const PipelineConfig& c, Stage stage) {
  const auto p = c.path(Artifact::Manifest);
  require(p, "manifest", stage);
  try {
    return dataset::manifest_from_json(read_json(p));
  } catch (const json::exception& e) {
    throw nvd::SchemaError(p.string() + ": " + e.what());
  }
}

void ingest(const PipelineConfig& c) {
  if (c.feeds.empty()) throw ConfigError("ingest: no feeds configured");
  for (const auto& f : c.feeds) require(f, "feed", Stage::Ingest);
  nvd::LoadReport rep;
  const auto entries = nvd::load_feed_files(c.feeds, &rep);
  {
    auto out = open_out(c.path(Artifact::Entries));
    nvd::write_jsonl(out, entries);
  }
  const auto v3 = nvd::filter_v3(entries);
  json feeds = json::array();
  for (const auto& f : c.feeds) feeds.push_back(f.filename().string());
  json j{{"feeds", feeds},
         {"items", rep.items},
         {"rejected", rep.rejected},
         {"dropped_references", rep.dropped_references},
         {"score_mismatches", rep.score_mismatches},
         {"entries", entries.size()},
         {"v3_entries", v3.size()}};
  if (!v3.empty()) j["descriptions"] = to_json(nvd::description_stats(v3));
  write_json(c.path(Artifact::IngestReport), j);
  spdlog::info("ingest: {} entries ({} with v3 vectors, {} rejected) -> {}", entries.size(),
               v3.size(), rep.rejected, c.path(Artifact::Entries).string());
}

void analyze_refs(const PipelineConfig& c) {
  const auto entries = read_entries(c, Stage::AnalyzeRefs);
  std::optional<refs::Taxonomy> taxonomy;
  if (!c.taxonomy.empty()) {
    require(c.taxonomy, "taxonomy", Stage::AnalyzeRefs);
    taxonomy = refs::Taxonomy::load(c.taxonomy);
  }
  const auto ranking = refs::rank_domains(entries, c.top_n, taxonomy ? &*taxonomy : nullptr);
  json rank = json::array();
  for (const auto& r : ranking) rank.push_back(refs::to_json(r));
  json by_year = json::object();
  for (const auto& [year, s] : refs::reference_stats_by_year(entries)) {
    by_year[std::to_string(year)] = refs::to_json(s);
  }
  const auto stats = refs::reference_stats(entries);
  write_json(c.path(Artifact::RefsReport),
             json{{"stats", refs::to_json(stats)}, {"by_year", by_year}, {"ranking", rank}});
  spdlog::info("analyze-refs: {} references over {} domains", stats.total_refs, stats.distinct_domains);
}

void scrape_stage(const PipelineConfig& c) {
  using namespace cvsstext::scrape;
  const auto entries = nvd::filter_v3(read_entries(c, Stage::Scrape));
  require(c.extractors_dir, "extractors directory", Stage::Scrape);
  const auto registry = ExtractorRegistry::load_dir(c.extractors_dir);
  std::vector<RewriteRule> rules;
  if (!c.rewrite_rules.empty()) {
    require(c.rewrite_rules, "rewrite rules", Stage::Scrape);
    rules = load_rewrite_rules(c.rewrite_rules);
  }
  const auto plan = plan_crawl(entries, c.select, registry);
  spdlog::info("scrape: {} jobs over {} extractors ({} duplicate URLs)", plan.jobs.size(),
               registry.size(), plan.duplicates.size());

  CrawlOptions opts;
  opts.workers = c.workers;
  opts.timeout = Seconds(c.timeout_secs);
  opts.agent = c.agent;
  opts.circuit_threshold = c.circuit_threshold;

  CrawlResult result;
  if (!c.fixtures_dir.empty()) {
    require(c.fixtures_dir, "fixtures directory", Stage::Scrape);
    opts.clock_timestamps = true;
    SimulatedClock clock;
    FixtureSource source(c.fixtures_dir, clock);
    result = run_crawl(plan.jobs, registry, rules, {&source, nullptr}, clock, opts);
  } else {
    SteadyClock clock;
    HttpSource http(c.agent);
    std::optional<BrowserSource> browser;
    if (!c.browser_command.empty()) browser.emplace(c.browser_command);
    result = run_crawl(plan.jobs, registry, rules, {&http, browser ? &*browser : nullptr}, clock, opts);
  }

  auto texts = open_out(c.path(Artifact::Scraped));
  auto meta = open_out(c.path(Artifact::ScrapeMeta));
  auto failures = open_out(c.path(Artifact::ScrapeFailures));
  for (const auto& r : result.results) {
    if (const auto* t = std::get_if<ScrapedText>(&r)) {
      texts << to_json(*t, false).dump() << '\n';
      meta << json{{"cve_id", t->cve_id}, {"url", t->url}, {"fetched_at", t->fetched_at}}.dump() << '\n';
    } else {
      failures << to_json(std::get<FetchFailure>(r)).dump() << '\n';
    }
  }
  const auto yield = yield_report(result, registry);
  auto yj = to_json(yield);
  yj["duplicate_urls"] = plan.duplicates.size();
  write_json(c.path(Artifact::YieldReport), yj);
  for (const auto& [site, row] : yield.sites) {
    spdlog::info("scrape: {:<28} {:>5}/{:<5} ({:.1f}%)", site, row.crawled, row.attempted,
                 100 * row.ratio());
  }
  spdlog::info("scrape: {} texts from {} jobs", yield.total.crawled, yield.total.attempted);
}

void build_dataset(const PipelineConfig& c) {
  const auto entries = read_entries(c, Stage::BuildDataset);
  dataset::BuildOptions opts;
  opts.sources = dataset::parse_source_filter(c.sources);
  std::vector<scrape::ScrapedText> scraped;
  if (opts.sources != dataset::SourceFilter::Descriptions) {
    const auto p = c.path(Artifact::Scraped);
    require(p, "scraped texts", Stage::BuildDataset);
    std::ifstream in(p);
    scraped = scrape::read_scraped_jsonl(in);
  }
  dataset::BuildReport rep;
  const auto corpus = dataset::build_corpus(entries, scraped, opts, &rep);
  const auto manifest = dataset::grouped_split(corpus, c.ratio, c.seed);
  {
    auto out = open_out(c.path(Artifact::Corpus));
    dataset::write_corpus_jsonl(out, corpus);
  }
  write_json(c.path(Artifact::Manifest), to_json(manifest));
  auto stats = to_json(dataset::corpus_stats(corpus));
  stats["sources"] = std::string(dataset::to_string(opts.sources));
  stats["build"] = {{"descriptions", rep.descriptions},
                    {"scraped", rep.scraped},
                    {"orphan_texts", rep.orphan_texts},
                    {"empty_skipped", rep.empty_skipped},
                    {"duplicates_dropped", rep.duplicates_dropped}};
  write_json(c.path(Artifact::CorpusStats), stats);
  spdlog::info("build-dataset: {} examples ({} descriptions, {} scraped); train {} CVEs / {} texts, "
               "test {} CVEs / {} texts",
               corpus.size(), rep.descriptions, rep.scraped, manifest.train.size(),
               manifest.train_texts, manifest.test.size(), manifest.test_texts);
}

std::vector<dataset::LabeledExample> side(const std::vector<dataset::LabeledExample>& corpus,
                                          const dataset::SplitManifest& m, bool test) {
  std::vector<dataset::LabeledExample> out;
  for (const auto& ex : corpus) {
    if (test ? m.in_test(ex.cve_id) : m.in_train(ex.cve_id)) out.push_back(ex);
  }
  return out;
}

void train(const PipelineConfig& c) {
  const auto corpus = read_corpus(c, Stage::Train);
  const auto manifest = read_manifest(c, Stage::Train);
  const auto train_set = side(corpus, manifest, false);
  const auto models = baseline::fit_all(train_set, {c.min_count});
  baseline::save_models(models, c.path(Artifact::Models));
  for (const auto& m : models) {
    spdlog::info("train: {:<2} vocabulary {}{}", cvss::component_name(m.component()),
                 m.vocabulary_size(), m.is_constant() ? " (constant)" : "");
  }
  spdlog::info("train: {} examples -> {}", train_set.size(), c.path(Artifact::Models).string());
}

void predict(const PipelineConfig& c) {
  const auto corpus = read_corpus(c, Stage::Predict);
  const auto manifest = read_manifest(c, Stage::Predict);
  require(c.path(Artifact::Models), "models", Stage::Predict);
  const auto models = baseline::load_models(c.path(Artifact::Models));
  const auto test = side(corpus, manifest, true);
  auto out = open_out(c.path(Artifact::Predictions));
  for (const auto& ex : test) {
    for (const auto& r : baseline::predict_records(models, ex)) out << to_json(r).dump() << '\n';
  }
  spdlog::info("predict: {} test texts -> {}", test.size(), c.path(Artifact::Predictions).string());
}

void evaluate(const PipelineConfig& c) {
  const auto manifest = read_manifest(c, Stage::Evaluate);
  const auto corpus = read_corpus(c, Stage::Evaluate);
  const auto p = c.path(Artifact::Predictions);
  require(p, "predictions", Stage::Evaluate);
  std::ifstream in(p);
  const auto preds = read_predictions_jsonl(in);
  const auto report = eval::evaluate_run(manifest, corpus, preds);
  write_json(c.path(Artifact::Report), to_json(report));
  auto out = open_out(c.path(Artifact::ReportText));
  eval::print_report(out, report);
  spdlog::info("evaluate: {} examples, MSE {:.3f}, MAE {:.3f}, correct {:.1f}%", report.examples,
               report.scores.mse, report.scores.mae, 100 * report.scores.frac_correct);
}

}  // namespace

void run_stage(Stage stage, const PipelineConfig& config) {
  config.validate();
  switch (stage) {
    case Stage::Ingest: return ingest(config);
    case Stage::AnalyzeRefs: return analyze_refs(config);
    case Stage::Scrape: return scrape_stage(config);
    case Stage::BuildDataset: return build_dataset(config);
    case Stage::Train: return train(config);
    case Stage::Predict: return predict(config);
    case Stage::Evaluate: return evaluate(config);
  }
}

}  // namespace cvsstext::pipeline
