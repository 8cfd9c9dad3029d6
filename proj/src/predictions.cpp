#include "cvsstext/predictions.hpp"

#include <istream>
#include <ostream>

#include "cvsstext/nvd.hpp"

namespace cvsstext {

using nlohmann::json;

json to_json(const PredictionRecord& p) {
  json scores = json::object();
  for (const auto& [value, score] : p.scores) {
    scores[std::string(1, value)] = score ? json(*score) : json(nullptr);
  }
  return json{{"cve_id", p.cve_id},
              {"text_ref", p.text_ref},
              {"component", std::string(cvss::component_name(p.component))},
              {"value", std::string(1, p.value)},
              {"scores", scores}};
}

PredictionRecord prediction_from_json(const json& j) {
  PredictionRecord p;
  p.cve_id = j.at("cve_id").get<std::string>();
  p.text_ref = j.at("text_ref").get<std::string>();
  const auto name = j.at("component").get<std::string>();
  const auto comp = cvss::component_from_name(name);
  if (!comp) throw nvd::SchemaError(p.cve_id + ": unknown component '" + name + "'");
  p.component = *comp;
  const auto value = j.at("value").get<std::string>();
  const auto allowed = cvss::component_values(*comp);
  if (value.size() != 1 || allowed.find(value[0]) == std::string_view::npos) {
    throw nvd::SchemaError(p.cve_id + ": " + name + " has no value '" + value + "'");
  }
  p.value = value[0];
  if (j.contains("scores")) {
    for (const auto& [k, v] : j.at("scores").items()) {
      if (k.size() != 1 || allowed.find(k[0]) == std::string_view::npos) {
        throw nvd::SchemaError(p.cve_id + ": " + name + " score for unknown value '" + k + "'");
      }
      p.scores.emplace_back(k[0], v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    }
  }
  return p;
}

void write_predictions_jsonl(std::ostream& out, const std::vector<PredictionRecord>& preds) {
  for (const auto& p : preds) out << to_json(p).dump() << '\n';
}

std::vector<PredictionRecord> read_predictions_jsonl(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(prediction_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw nvd::SchemaError("predictions line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cvsstext
