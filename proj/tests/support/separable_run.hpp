#pragma once

// Runs every pipeline stage on the separable fixture corpus in a scratch
// directory and returns the evaluation report.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "cvsstext/pipeline.hpp"

namespace testsupport {

struct SeparableRun {
  nlohmann::json report;
  double seconds = 0.0;
  std::filesystem::path work_dir;
};

inline cvsstext::pipeline::PipelineConfig separable_config(const std::filesystem::path& work_dir) {
  auto c = cvsstext::pipeline::PipelineConfig::load(std::string(CVSSTEXT_FIXTURES) +
                                                    "/separable/config.json");
  c.work_dir = work_dir;
  return c;
}

inline SeparableRun run_separable_pipeline(const std::filesystem::path& work_dir) {
  using namespace cvsstext::pipeline;
  std::filesystem::remove_all(work_dir);
  const auto config = separable_config(work_dir);
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto stage : kAllStages) run_stage(stage, config);
  SeparableRun r;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ifstream in(config.path(Artifact::Report));
  r.report = nlohmann::json::parse(in);
  r.work_dir = work_dir;
  return r;
}

}  // namespace testsupport
