#pragma once

// Per-component multinomial naive Bayes over unigrams. One model per CVSS
// base metric; the eight models are fitted independently.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cvsstext/cvss.hpp"
#include "cvsstext/dataset.hpp"
#include "cvsstext/predictions.hpp"

namespace cvsstext::baseline {

inline constexpr std::string_view kCveToken = "<CVE>";
inline constexpr std::string_view kVersionToken = "<VER>";

/// Lowercased word tokens. CVE ids become <CVE> and dotted version numbers
/// (optionally "v"-prefixed) become <VER>. Punctuation and underscores
/// separate tokens and never form tokens themselves.
std::vector<std::string> tokenize(std::string_view text);

class EmptyTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  std::size_t min_count = 2;  // tokens seen fewer times across the training set are dropped
};

struct Prediction {
  std::size_t index = 0;       // into component_values()
  std::vector<double> scores;  // log scores; -inf for classes never seen in training
  char value(cvss::Component c) const { return cvss::component_values(c)[index]; }
};

class ComponentModel;

/// Throws EmptyTrainingSet. A single-class training set, or a model whose
/// training accuracy falls below the majority-class frequency, degrades to
/// the constant majority predictor with a warning.
ComponentModel fit(cvss::Component component, std::span<const std::vector<std::string>> docs,
                   std::span<const cvss::CvssVector> labels, const FitOptions& options = {});

class ComponentModel {
 public:
  ComponentModel() = default;

  cvss::Component component() const noexcept { return component_; }
  std::string_view classes() const noexcept { return cvss::component_values(component_); }
  std::size_t vocabulary_size() const noexcept { return vocab_.size(); }
  bool is_constant() const noexcept { return constant_.has_value(); }
  const std::vector<double>& log_prior() const noexcept { return log_prior_; }

  /// Argmax of prior plus in-vocabulary token weights; ties go to the earlier
  /// value in canonical order. Out-of-vocabulary tokens are ignored.
  Prediction predict(std::span<const std::string> tokens) const;

  void save(std::ostream& out) const;
  static ComponentModel load(std::istream& in);

  friend ComponentModel fit(cvss::Component component,
                            std::span<const std::vector<std::string>> docs,
                            std::span<const cvss::CvssVector> labels, const FitOptions& options);

 private:
  cvss::Component component_ = cvss::Component::AV;
  std::vector<std::string> vocab_;  // sorted
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> weights_;     // weights_[t * K + k]
  std::vector<double> log_prior_;
  std::optional<std::size_t> constant_;

  void reindex();
};

/// Eight fitted models, indexed like cvss::kComponents.
using ModelSet = std::array<ComponentModel, 8>;

/// Fits all eight components concurrently on the given examples.
ModelSet fit_all(const std::vector<dataset::LabeledExample>& train, const FitOptions& options = {});

cvss::CvssVector predict_vector(const ModelSet& models, std::span<const std::string> tokens);

/// One prediction record per component for the example.
std::vector<PredictionRecord> predict_records(const ModelSet& models,
                                              const dataset::LabeledExample& example);

/// Files are named <component>.nbm, e.g. AV.nbm.
void save_models(const ModelSet& models, const std::filesystem::path& dir);
ModelSet load_models(const std::filesystem::path& dir);

}  // namespace cvsstext::baseline
