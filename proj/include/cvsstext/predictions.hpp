#pragma once

// Prediction JSONL, the interchange format between classifiers and the
// evaluator. One line per (text, component):
//   {"cve_id": ..., "text_ref": ..., "component": "AV", "value": "N",
//    "scores": {"N": -3.2, "A": null, ...}}
// A null score marks a class the model can never predict.

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cvsstext/cvss.hpp"

namespace cvsstext {

struct PredictionRecord {
  std::string cve_id;
  std::string text_ref;
  cvss::Component component = cvss::Component::AV;
  char value = 'N';
  std::vector<std::pair<char, std::optional<double>>> scores;
};

nlohmann::json to_json(const PredictionRecord& p);
/// Throws nvd::SchemaError on unknown components or values.
PredictionRecord prediction_from_json(const nlohmann::json& j);

void write_predictions_jsonl(std::ostream& out, const std::vector<PredictionRecord>& preds);
std::vector<PredictionRecord> read_predictions_jsonl(std::istream& in);

}  // namespace cvsstext
