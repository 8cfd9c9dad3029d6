#include "cvsstext/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "cvsstext/text.hpp"

namespace cvsstext::baseline {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::string_view kMagic = "cvsstext-nb";
constexpr int kFormatVersion = 1;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::size_t digits(std::string_view s, std::size_t i) {
  while (i < s.size() && is_digit(s[i])) ++i;
  return i;
}

// End of a CVE id starting at i, or 0.
std::size_t match_cve(std::string_view s, std::size_t i) {
  if (s.size() - i < 13) return 0;
  if (text::to_lower_ascii(s.substr(i, 3)) != "cve") return 0;
  std::size_t j = i + 3;
  if (s[j] != '-' && s[j] != '_') return 0;
  const std::size_t year_end = digits(s, ++j);
  if (year_end - j != 4 || year_end >= s.size()) return 0;
  if (s[year_end] != '-' && s[year_end] != '_') return 0;
  j = year_end + 1;
  const std::size_t end = digits(s, j);
  if (end - j < 4) return 0;
  if (end < s.size() && is_alnum(s[end])) return 0;
  return end;
}

// End of a dotted version number ("3.1.1", "v2.4.49rc1") starting at i, or 0.
std::size_t match_version(std::string_view s, std::size_t i) {
  std::size_t j = i;
  if (j < s.size() && (s[j] == 'v' || s[j] == 'V')) ++j;
  std::size_t k = digits(s, j);
  if (k == j) return 0;
  int dots = 0;
  while (k + 1 < s.size() && s[k] == '.' && is_digit(s[k + 1])) {
    k = digits(s, k + 1);
    ++dots;
  }
  if (dots == 0) return 0;
  while (k < s.size() && is_alnum(s[k])) ++k;
  return k;
}

bool token_char(char32_t cp) { return cp != '_' && text::is_word_char(cp); }

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (const auto e = match_cve(s, i)) {
      out.emplace_back(kCveToken);
      i = e;
      continue;
    }
    if (const auto e = match_version(s, i)) {
      out.emplace_back(kVersionToken);
      i = e;
      continue;
    }
    std::size_t next = i;
    char32_t cp = text::decode_next(s, next);
    if (!token_char(cp)) {
      i = next;
      continue;
    }
    std::string word;
    while (token_char(cp)) {
      text::append_utf8(word, text::to_lower(cp));
      i = next;
      if (i >= s.size()) break;
      cp = text::decode_next(s, next);
    }
    out.push_back(std::move(word));
  }
  return out;
}

void ComponentModel::reindex() {
  index_.clear();
  index_.reserve(vocab_.size());
  for (std::size_t t = 0; t < vocab_.size(); ++t) index_.emplace(vocab_[t], t);
}

Prediction ComponentModel::predict(std::span<const std::string> tokens) const {
  Prediction p;
  p.scores = log_prior_;
  if (constant_) {
    p.index = *constant_;
    return p;
  }
  const std::size_t k_count = log_prior_.size();
  for (const auto& tok : tokens) {
    const auto it = index_.find(tok);
    if (it == index_.end()) continue;
    const double* w = &weights_[it->second * k_count];
    for (std::size_t k = 0; k < k_count; ++k) p.scores[k] += w[k];
  }
  p.index = 0;
  for (std::size_t k = 1; k < k_count; ++k) {
    if (p.scores[k] > p.scores[p.index]) p.index = k;
  }
  return p;
}

ComponentModel fit(cvss::Component component, std::span<const std::vector<std::string>> docs,
                   std::span<const cvss::CvssVector> labels, const FitOptions& options) {
  const auto name = cvss::component_name(component);
  if (docs.empty()) throw EmptyTrainingSet(fmt::format("{}: no training examples", name));
  if (docs.size() != labels.size()) {
    throw std::invalid_argument(fmt::format("{}: {} docs but {} labels", name, docs.size(), labels.size()));
  }
  const std::size_t k_count = cvss::component_cardinality(component);

  ComponentModel m;
  m.component_ = component;
  std::vector<std::size_t> y(docs.size());
  std::vector<std::size_t> doc_counts(k_count, 0);
  std::map<std::string, std::size_t> totals;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    y[d] = labels[d].index(component);
    ++doc_counts[y[d]];
    for (const auto& tok : docs[d]) ++totals[tok];
  }
  for (const auto& [tok, n] : totals) {
    if (n >= options.min_count) m.vocab_.push_back(tok);
  }
  m.reindex();

  const std::size_t v = m.vocab_.size();
  std::vector<std::size_t> counts(v * k_count, 0);
  std::vector<std::size_t> class_tokens(k_count, 0);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& tok : docs[d]) {
      const auto it = m.index_.find(tok);
      if (it == m.index_.end()) continue;
      ++counts[it->second * k_count + y[d]];
      ++class_tokens[y[d]];
    }
  }
  m.weights_.resize(v * k_count);
  for (std::size_t t = 0; t < v; ++t) {
    for (std::size_t k = 0; k < k_count; ++k) {
      m.weights_[t * k_count + k] =
          std::log(static_cast<double>(counts[t * k_count + k] + 1) /
                   static_cast<double>(class_tokens[k] + v));
    }
  }
  m.log_prior_.resize(k_count);
  std::size_t majority = 0;
  std::size_t distinct = 0;
  for (std::size_t k = 0; k < k_count; ++k) {
    m.log_prior_[k] = doc_counts[k]
                          ? std::log(static_cast<double>(doc_counts[k]) / static_cast<double>(docs.size()))
                          : kNegInf;
    if (doc_counts[k]) ++distinct;
    if (doc_counts[k] > doc_counts[majority]) majority = k;
  }
  if (v == 0) spdlog::warn("{}: empty vocabulary after pruning, predicting from priors", name);

  if (distinct == 1) {
    spdlog::warn("{}: single class '{}' in training data, using a constant predictor", name,
                 cvss::component_values(component)[majority]);
    m.constant_ = majority;
    return m;
  }
  std::size_t correct = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) correct += m.predict(docs[d]).index == y[d];
  if (correct < doc_counts[majority]) {
    spdlog::warn("{}: training accuracy {}/{} below majority class, using a constant predictor",
                 name, correct, docs.size());
    m.constant_ = majority;
  }
  return m;
}

void ComponentModel::save(std::ostream& out) const {
  const std::size_t k_count = log_prior_.size();
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "component " << cvss::component_name(component_) << '\n';
  out << "classes " << classes() << '\n';
  out << "prior";
  for (double p : log_prior_) out << ' ' << fmt::format("{:.17g}", p);
  out << '\n';
  out << "constant " << (constant_ ? classes()[*constant_] : '-') << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    out << vocab_[t];
    for (std::size_t k = 0; k < k_count; ++k) {
      out << '\t' << fmt::format("{:.17g}", weights_[t * k_count + k]);
    }
    out << '\n';
  }
}

namespace {

std::string expect_line(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) throw ModelFormatError(fmt::format("model truncated before '{}'", key));
  if (!line.starts_with(key) || (line.size() > key.size() && line[key.size()] != ' ')) {
    throw ModelFormatError(fmt::format("expected '{}', got '{}'", key, line));
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
}

double parse_double(const std::string& s) {
  if (s == "-inf") return kNegInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ModelFormatError("bad number '" + s + "'");
  }
  if (used != s.size()) throw ModelFormatError("bad number '" + s + "'");
  return v;
}

}  // namespace

ComponentModel ComponentModel::load(std::istream& in) {
  ComponentModel m;
  const auto version = expect_line(in, kMagic);
  if (version != std::to_string(kFormatVersion)) {
    throw ModelFormatError("unsupported model format version " + version);
  }
  const auto comp = cvss::component_from_name(expect_line(in, "component"));
  if (!comp) throw ModelFormatError("unknown component in model header");
  m.component_ = *comp;
  if (expect_line(in, "classes") != m.classes()) {
    throw ModelFormatError("class list does not match the component enumeration");
  }
  const std::size_t k_count = m.classes().size();
  std::istringstream priors(expect_line(in, "prior"));
  for (std::string tok; priors >> tok;) m.log_prior_.push_back(parse_double(tok));
  if (m.log_prior_.size() != k_count) throw ModelFormatError("prior count mismatch");
  const auto constant = expect_line(in, "constant");
  if (constant != "-") {
    const auto pos = m.classes().find(constant);
    if (constant.size() != 1 || pos == std::string_view::npos) {
      throw ModelFormatError("bad constant class '" + constant + "'");
    }
    m.constant_ = pos;
  }
  const auto v = static_cast<std::size_t>(parse_double(expect_line(in, "vocab")));
  m.vocab_.reserve(v);
  m.weights_.reserve(v * k_count);
  std::string line;
  for (std::size_t t = 0; t < v; ++t) {
    if (!std::getline(in, line)) throw ModelFormatError("model truncated in vocabulary");
    std::istringstream row(line);
    std::string tok;
    std::getline(row, tok, '\t');
    m.vocab_.push_back(tok);
    for (std::size_t k = 0; k < k_count; ++k) {
      std::string w;
      if (!std::getline(row, w, '\t')) throw ModelFormatError("short weight row for '" + tok + "'");
      m.weights_.push_back(parse_double(w));
    }
  }
  if (!std::is_sorted(m.vocab_.begin(), m.vocab_.end())) {
    throw ModelFormatError("vocabulary is not sorted");
  }
  m.reindex();
  return m;
}

ModelSet fit_all(const std::vector<dataset::LabeledExample>& train, const FitOptions& options) {
  std::vector<std::vector<std::string>> docs;
  std::vector<cvss::CvssVector> labels;
  docs.reserve(train.size());
  labels.reserve(train.size());
  for (const auto& ex : train) {
    docs.push_back(tokenize(ex.text));
    labels.push_back(ex.labels);
  }
  ModelSet models;
  std::array<std::exception_ptr, 8> errors;
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < cvss::kComponents.size(); ++k) {
    threads.emplace_back([&, k] {
      try {
        models[k] = fit(cvss::kComponents[k], docs, labels, options);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return models;
}

cvss::CvssVector predict_vector(const ModelSet& models, std::span<const std::string> tokens) {
  cvss::CvssVector v;
  for (const auto& m : models) v.set_index(m.component(), m.predict(tokens).index);
  return v;
}

std::vector<PredictionRecord> predict_records(const ModelSet& models,
                                              const dataset::LabeledExample& example) {
  const auto tokens = tokenize(example.text);
  std::vector<PredictionRecord> out;
  out.reserve(models.size());
  for (const auto& m : models) {
    const auto p = m.predict(tokens);
    PredictionRecord r{example.cve_id, example.text_ref, m.component(), p.value(m.component()), {}};
    for (std::size_t k = 0; k < p.scores.size(); ++k) {
      r.scores.emplace_back(m.classes()[k], std::isfinite(p.scores[k])
                                                ? std::optional<double>(p.scores[k])
                                                : std::nullopt);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void save_models(const ModelSet& models, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& m : models) {
    const auto path = dir / (std::string(cvss::component_name(m.component())) + ".nbm");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    m.save(out);
  }
}

ModelSet load_models(const std::filesystem::path& dir) {
  ModelSet models;
  for (std::size_t k = 0; k < cvss::kComponents.size(); ++k) {
    const auto c = cvss::kComponents[k];
    const auto path = dir / (std::string(cvss::component_name(c)) + ".nbm");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read model " + path.string());
    try {
      models[k] = ComponentModel::load(in);
    } catch (const ModelFormatError& e) {
      throw ModelFormatError(path.string() + ": " + e.what());
    }
    if (models[k].component() != c) {
      throw ModelFormatError(path.string() + ": holds the wrong component");
    }
  }
  return models;
}

}  // namespace cvsstext::baseline
