#pragma once

// Classification metrics per component, score-level error with a direction
// breakdown, and the test-set join of predictions against ground truth.

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cvsstext/cvss.hpp"
#include "cvsstext/dataset.hpp"
#include "cvsstext/predictions.hpp"
#include "cvsstext/stats.hpp"

namespace cvsstext::eval {

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateKappa : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class MissingPrediction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownExample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rows are truth, columns are predictions.
struct ConfusionMatrix {
  std::string classes;
  std::vector<std::vector<std::size_t>> counts;

  explicit ConfusionMatrix(std::string classes_);
  void add(char truth, char pred);
  std::size_t total() const;
  std::size_t index_of(char c) const;
};

struct ClassificationReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  std::optional<double> cohen_kappa;  // absent when chance agreement is 1
};

/// Macro averages run over the classes present in truth or predictions;
/// 0/0 precision or recall counts as 0. Throws EmptyInput, and
/// DegenerateKappa when expected agreement is 1.
ClassificationReport classification_metrics(const ConfusionMatrix& m);

/// Classes are taken in first-seen order. Throws LengthMismatch, EmptyInput
/// and DegenerateKappa.
ClassificationReport classification_metrics(std::span<const char> truth, std::span<const char> pred);

/// Like classification_metrics, but a degenerate κ is reported as absent.
ClassificationReport classification_report(const ConfusionMatrix& m);

struct ScoreEvalReport {
  std::size_t n = 0;
  double mse = 0.0;
  double mae = 0.0;
  std::size_t correct = 0;
  std::size_t higher = 0;
  std::size_t lower = 0;
  double frac_correct = 0.0;
  double frac_higher = 0.0;
  double frac_lower = 0.0;
  std::size_t zero_score_count = 0;
  std::vector<std::string> zero_score_cases;
};

/// Scores both sides with cvss-core. Correct means equal one-decimal scores.
/// zero_score_cases names predictions scoring 0.0 against a nonzero truth;
/// `ids` labels them and may be empty (positions are used instead).
ScoreEvalReport score_eval(std::span<const cvss::CvssVector> truth,
                           std::span<const cvss::CvssVector> pred,
                           std::span<const std::string> ids = {});

/// Same, from one-decimal base scores.
ScoreEvalReport score_eval_scores(std::span<const double> truth, std::span<const double> pred,
                                  std::span<const std::string> ids = {});

struct ComponentResult {
  cvss::Component component = cvss::Component::AV;
  ConfusionMatrix confusion{""};
  ClassificationReport report;
};

struct EvalReport {
  std::size_t examples = 0;
  std::vector<ComponentResult> components;  // kComponents order
  ScoreEvalReport scores;
};

/// Joins predictions to the test-set examples of the corpus by
/// (cve_id, text_ref). Throws MissingPrediction when a test example lacks a
/// component, UnknownExample for predictions outside the test set, and
/// nvd::SchemaError for duplicate predictions.
EvalReport evaluate_run(const dataset::SplitManifest& manifest,
                        const std::vector<dataset::LabeledExample>& corpus,
                        const std::vector<PredictionRecord>& predictions);

nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const ScoreEvalReport& r);
nlohmann::json to_json(const EvalReport& r);
void print_report(std::ostream& out, const EvalReport& r);

}  // namespace cvsstext::eval
