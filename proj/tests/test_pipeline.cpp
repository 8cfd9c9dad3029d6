#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cvsstext/eval.hpp"
#include "cvsstext/pipeline.hpp"
#include "support/separable_run.hpp"

using namespace cvsstext;
using namespace cvsstext::pipeline;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "cvsstext-pipeline-test";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Pipeline, SeparableFixtureEndToEnd) {
  const auto run = testsupport::run_separable_pipeline(kScratch / "a");
  EXPECT_LT(run.seconds, 60.0);
  for (const auto& [name, comp] : run.report["components"].items()) {
    EXPECT_GE(comp["accuracy"].get<double>(), 0.95) << name;
  }
  EXPECT_GE(run.report["scores"]["pred_c"].get<double>(), 0.9);

  const auto yield = nlohmann::json::parse(slurp(run.work_dir / "yield.json"));
  EXPECT_GT(yield["total"]["crawled"].get<int>(), 100);
  const auto stats = nlohmann::json::parse(slurp(run.work_dir / "corpus_stats.json"));
  EXPECT_EQ(stats["build"]["orphan_texts"], 0);
  EXPECT_GT(stats["build"]["scraped"].get<int>(), 100);
}

TEST(Pipeline, RerunIsByteIdentical) {
  const auto a = testsupport::run_separable_pipeline(kScratch / "b1");
  const auto b = testsupport::run_separable_pipeline(kScratch / "b2");
  for (const char* name : {"entries.jsonl", "refs_report.json", "scraped.jsonl", "scraped_meta.jsonl",
                           "scrape_failures.jsonl", "yield.json", "corpus.jsonl", "manifest.json",
                           "corpus_stats.json", "models/AV.nbm", "models/A.nbm", "predictions.jsonl",
                           "report.json"}) {
    EXPECT_EQ(slurp(a.work_dir / name), slurp(b.work_dir / name)) << name;
    EXPECT_FALSE(slurp(a.work_dir / name).empty()) << name;
  }
}

TEST(Pipeline, DescriptionsOnlyCorpus) {
  auto c = testsupport::separable_config(kScratch / "c");
  fs::remove_all(c.work_dir);
  c.sources = "descriptions";
  run_stage(Stage::Ingest, c);
  run_stage(Stage::BuildDataset, c);  // no scrape needed
  const auto stats = nlohmann::json::parse(slurp(c.path(Artifact::CorpusStats)));
  EXPECT_EQ(stats["build"]["scraped"], 0);
  EXPECT_EQ(stats["build"]["descriptions"], 400);
}

TEST(Pipeline, IngestSampleFeed) {
  PipelineConfig c;
  c.work_dir = kScratch / "d";
  fs::remove_all(c.work_dir);
  c.feeds = {std::string(CVSSTEXT_FIXTURES) + "/nvd/nvdcve-1.1-sample.json.gz"};
  run_stage(Stage::Ingest, c);
  const auto report = nlohmann::json::parse(slurp(c.path(Artifact::IngestReport)));
  EXPECT_EQ(report["entries"], 23);
  EXPECT_EQ(report["v3_entries"], 22);
  EXPECT_EQ(report["rejected"], 1);
}

TEST(Pipeline, MissingArtifacts) {
  PipelineConfig c;
  c.work_dir = kScratch / "empty";
  fs::remove_all(c.work_dir);
  EXPECT_THROW(run_stage(Stage::Evaluate, c), MissingArtifact);
  EXPECT_THROW(run_stage(Stage::Train, c), MissingArtifact);
  EXPECT_THROW(run_stage(Stage::Ingest, c), ConfigError);  // no feeds
  c.feeds = {c.work_dir / "nope.json"};
  EXPECT_THROW(run_stage(Stage::Ingest, c), MissingArtifact);
}

TEST(Pipeline, EvaluateRejectsIncompletePredictions) {
  const auto run = testsupport::run_separable_pipeline(kScratch / "e");
  const auto preds = run.work_dir / "predictions.jsonl";
  auto text = slurp(preds);
  text.erase(0, text.find('\n') + 1);
  std::ofstream(preds, std::ios::binary) << text;
  EXPECT_THROW(run_stage(Stage::Evaluate, testsupport::separable_config(run.work_dir)),
               eval::MissingPrediction);
}

TEST(PipelineConfig, ParsesAndResolvesRelativePaths) {
  const auto j = nlohmann::json::parse(R"({
    "work_dir": "out", "feeds": ["a.json", "/abs/b.json"],
    "scraper": {"workers": 2, "timeout_secs": 5.5},
    "split": {"ratio": 0.8, "seed": 11, "sources": "descriptions"},
    "paths": {"corpus": "elsewhere/corpus.jsonl"}
  })");
  const auto c = PipelineConfig::from_json(j, "/base");
  EXPECT_EQ(c.work_dir, fs::path("/base/out"));
  EXPECT_EQ(c.feeds[0], fs::path("/base/a.json"));
  EXPECT_EQ(c.feeds[1], fs::path("/abs/b.json"));
  EXPECT_EQ(c.workers, 2u);
  EXPECT_DOUBLE_EQ(c.timeout_secs, 5.5);
  EXPECT_EQ(c.seed, 11u);
  EXPECT_EQ(c.path(Artifact::Corpus), fs::path("/base/elsewhere/corpus.jsonl"));
  EXPECT_EQ(c.path(Artifact::Manifest), fs::path("/base/out/manifest.json"));
  EXPECT_NO_THROW(c.validate());
}

TEST(PipelineConfig, RejectsBadInput) {
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json::parse(R"({"feds": []})"), "/"), ConfigError);
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json::parse(R"({"split": {"ratio": "x"}})"), "/"),
               ConfigError);
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json::parse(R"({"paths": {"nope": "x"}})"), "/"),
               ConfigError);
  PipelineConfig c;
  c.ratio = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.ratio = 0.75;
  c.workers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.workers = 1;
  c.sources = "everything";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Stages, NamesRoundTrip) {
  for (const auto s : kAllStages) EXPECT_EQ(stage_from_name(to_string(s)), s);
  EXPECT_FALSE(stage_from_name("deploy"));
}
