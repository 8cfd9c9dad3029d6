#include "cvsstext/eval.hpp"

#include <cstdint>
#include <cstdlib>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "cvsstext/nvd.hpp"

namespace cvsstext::eval {

using nlohmann::json;

ConfusionMatrix::ConfusionMatrix(std::string classes_)
    : classes(std::move(classes_)),
      counts(classes.size(), std::vector<std::size_t>(classes.size(), 0)) {}

std::size_t ConfusionMatrix::index_of(char c) const {
  const auto pos = classes.find(c);
  if (pos == std::string::npos) {
    throw std::invalid_argument(fmt::format("label '{}' not in class list '{}'", c, classes));
  }
  return pos;
}

void ConfusionMatrix::add(char truth, char pred) { ++counts[index_of(truth)][index_of(pred)]; }

std::size_t ConfusionMatrix::total() const {
  std::size_t n = 0;
  for (const auto& row : counts) {
    for (auto c : row) n += c;
  }
  return n;
}

namespace {

ClassificationReport metrics(const ConfusionMatrix& m, bool kappa_must_exist) {
  const std::size_t k_count = m.classes.size();
  const std::size_t n = m.total();
  if (n == 0) throw EmptyInput("classification metrics need at least one pair");

  std::vector<std::uint64_t> row(k_count, 0), col(k_count, 0);
  std::uint64_t trace = 0;
  for (std::size_t i = 0; i < k_count; ++i) {
    for (std::size_t j = 0; j < k_count; ++j) {
      row[i] += m.counts[i][j];
      col[j] += m.counts[i][j];
    }
    trace += m.counts[i][i];
  }

  ClassificationReport r;
  r.n = n;
  r.accuracy = static_cast<double>(trace) / static_cast<double>(n);
  std::size_t present = 0;
  std::uint64_t chance = 0;  // sum of row * col marginal products
  for (std::size_t i = 0; i < k_count; ++i) {
    chance += row[i] * col[i];
    if (row[i] == 0 && col[i] == 0) continue;
    ++present;
    const double tp = static_cast<double>(m.counts[i][i]);
    const double precision = col[i] ? tp / static_cast<double>(col[i]) : 0.0;
    const double recall = row[i] ? tp / static_cast<double>(row[i]) : 0.0;
    const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    r.macro_precision += precision;
    r.macro_recall += recall;
    r.macro_f1 += f1;
  }
  r.macro_precision /= static_cast<double>(present);
  r.macro_recall /= static_cast<double>(present);
  r.macro_f1 /= static_cast<double>(present);

  // κ = (n·trace − Σ row·col) / (n² − Σ row·col), exact in integers up to the division.
  const std::uint64_t nn = static_cast<std::uint64_t>(n) * n;
  if (chance == nn) {
    if (kappa_must_exist) throw DegenerateKappa("Cohen's kappa is undefined: chance agreement is 1");
    return r;
  }
  const double num = static_cast<double>(static_cast<std::int64_t>(n * trace) - static_cast<std::int64_t>(chance));
  r.cohen_kappa = num / static_cast<double>(nn - chance);
  return r;
}

}  // namespace

ClassificationReport classification_metrics(const ConfusionMatrix& m) { return metrics(m, true); }

ClassificationReport classification_report(const ConfusionMatrix& m) { return metrics(m, false); }

ClassificationReport classification_metrics(std::span<const char> truth, std::span<const char> pred) {
  if (truth.size() != pred.size()) {
    throw LengthMismatch(fmt::format("{} truth labels but {} predictions", truth.size(), pred.size()));
  }
  if (truth.empty()) throw EmptyInput("classification metrics need at least one pair");
  std::string classes;
  for (const auto* side : {&truth, &pred}) {
    for (char c : *side) {
      if (classes.find(c) == std::string::npos) classes.push_back(c);
    }
  }
  ConfusionMatrix m(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], pred[i]);
  return classification_metrics(m);
}

ScoreEvalReport score_eval_scores(std::span<const double> truth, std::span<const double> pred,
                                  std::span<const std::string> ids) {
  if (truth.size() != pred.size()) {
    throw LengthMismatch(fmt::format("{} truth scores but {} predictions", truth.size(), pred.size()));
  }
  if (truth.empty()) throw EmptyInput("score evaluation needs at least one pair");
  ScoreEvalReport r;
  r.n = truth.size();
  // Scores are multiples of 0.1, so work in integer tenths.
  std::uint64_t sq = 0, abs_sum = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = cvss::score_tenths(truth[i]);
    const int p = cvss::score_tenths(pred[i]);
    const int d = p - t;
    sq += static_cast<std::uint64_t>(d * d);
    abs_sum += static_cast<std::uint64_t>(std::abs(d));
    if (d == 0) {
      ++r.correct;
    } else if (d > 0) {
      ++r.higher;
    } else {
      ++r.lower;
    }
    if (p == 0 && t > 0) {
      ++r.zero_score_count;
      r.zero_score_cases.push_back(i < ids.size() ? ids[i] : std::to_string(i));
    }
  }
  const auto n = static_cast<double>(r.n);
  r.mse = static_cast<double>(sq) / 100.0 / n;
  r.mae = static_cast<double>(abs_sum) / 10.0 / n;
  r.frac_correct = static_cast<double>(r.correct) / n;
  r.frac_higher = static_cast<double>(r.higher) / n;
  r.frac_lower = static_cast<double>(r.lower) / n;
  return r;
}

ScoreEvalReport score_eval(std::span<const cvss::CvssVector> truth,
                           std::span<const cvss::CvssVector> pred, std::span<const std::string> ids) {
  if (truth.size() != pred.size()) {
    throw LengthMismatch(fmt::format("{} truth vectors but {} predictions", truth.size(), pred.size()));
  }
  std::vector<double> t, p;
  t.reserve(truth.size());
  p.reserve(pred.size());
  for (const auto& v : truth) t.push_back(cvss::compute_base_score(v).base_score);
  for (const auto& v : pred) p.push_back(cvss::compute_base_score(v).base_score);
  return score_eval_scores(t, p, ids);
}

EvalReport evaluate_run(const dataset::SplitManifest& manifest,
                        const std::vector<dataset::LabeledExample>& corpus,
                        const std::vector<PredictionRecord>& predictions) {
  std::vector<const dataset::LabeledExample*> test;
  std::map<std::pair<std::string, std::string>, std::size_t> key_index;
  for (const auto& ex : corpus) {
    if (!manifest.in_test(ex.cve_id)) continue;
    const auto [it, fresh] = key_index.emplace(std::pair{ex.cve_id, ex.text_ref}, test.size());
    if (!fresh) throw nvd::SchemaError("corpus repeats text " + ex.cve_id + " " + ex.text_ref);
    test.push_back(&ex);
  }
  if (test.empty()) throw EmptyInput("the manifest's test set has no corpus examples");

  std::vector<std::array<std::optional<char>, 8>> got(test.size());
  for (const auto& p : predictions) {
    const auto it = key_index.find({p.cve_id, p.text_ref});
    if (it == key_index.end()) {
      const char* where = manifest.in_train(p.cve_id) ? "a training-set CVE" : "no test example";
      throw UnknownExample(fmt::format("prediction for {} {} refers to {}", p.cve_id, p.text_ref, where));
    }
    auto& slot = got[it->second][static_cast<std::size_t>(p.component)];
    if (slot) {
      throw nvd::SchemaError(fmt::format("duplicate {} prediction for {} {}",
                                         cvss::component_name(p.component), p.cve_id, p.text_ref));
    }
    slot = p.value;
  }
  std::size_t missing = 0;
  std::string first_missing;
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (const auto c : cvss::kComponents) {
      if (got[i][static_cast<std::size_t>(c)]) continue;
      if (!missing++) {
        first_missing = fmt::format("{} for {} {}", cvss::component_name(c), test[i]->cve_id,
                                    test[i]->text_ref);
      }
    }
  }
  if (missing) {
    throw MissingPrediction(fmt::format("{} missing predictions (first: {})", missing, first_missing));
  }

  EvalReport rep;
  rep.examples = test.size();
  std::vector<cvss::CvssVector> truth, pred;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < test.size(); ++i) {
    truth.push_back(test[i]->labels);
    ids.push_back(test[i]->cve_id);
    cvss::CvssVector v;
    for (const auto c : cvss::kComponents) v.set_letter(c, *got[i][static_cast<std::size_t>(c)]);
    pred.push_back(v);
  }
  for (const auto c : cvss::kComponents) {
    ComponentResult cr;
    cr.component = c;
    cr.confusion = ConfusionMatrix(std::string(cvss::component_values(c)));
    for (std::size_t i = 0; i < test.size(); ++i) cr.confusion.add(truth[i].letter(c), pred[i].letter(c));
    cr.report = classification_report(cr.confusion);
    rep.components.push_back(std::move(cr));
  }
  rep.scores = score_eval(truth, pred, ids);
  return rep;
}

json to_json(const ClassificationReport& r) {
  return json{{"n", r.n},
              {"accuracy", r.accuracy},
              {"recall", r.macro_recall},
              {"precision", r.macro_precision},
              {"f1", r.macro_f1},
              {"kappa", r.cohen_kappa ? json(*r.cohen_kappa) : json(nullptr)}};
}

json to_json(const ScoreEvalReport& r) {
  return json{{"n", r.n},
              {"mse", r.mse},
              {"mae", r.mae},
              {"correct", r.correct},
              {"higher", r.higher},
              {"lower", r.lower},
              {"pred_c", r.frac_correct},
              {"pred_h", r.frac_higher},
              {"pred_l", r.frac_lower},
              {"zero_score_count", r.zero_score_count},
              {"zero_score_cases", r.zero_score_cases}};
}

json to_json(const EvalReport& r) {
  json comps = json::object();
  for (const auto& c : r.components) {
    auto j = to_json(c.report);
    j["confusion"] = {{"classes", c.confusion.classes}, {"counts", c.confusion.counts}};
    comps[std::string(cvss::component_name(c.component))] = std::move(j);
  }
  return json{{"examples", r.examples}, {"components", comps}, {"scores", to_json(r.scores)}};
}

void print_report(std::ostream& out, const EvalReport& r) {
  out << fmt::format("test examples: {}\n\n", r.examples);
  out << fmt::format("{:<5} {:>7} {:>7} {:>7} {:>7} {:>7}\n", "", "Acc", "Rec", "Prec", "F1", "kappa");
  for (const auto& c : r.components) {
    const auto& m = c.report;
    out << fmt::format("{:<5} {:>7.3f} {:>7.3f} {:>7.3f} {:>7.3f} {:>7}\n",
                       cvss::component_name(c.component), m.accuracy, m.macro_recall,
                       m.macro_precision, m.macro_f1,
                       m.cohen_kappa ? fmt::format("{:.3f}", *m.cohen_kappa) : "n/a");
  }
  const auto& s = r.scores;
  out << fmt::format("\nMSE {:.3f}  MAE {:.3f}  correct {:.1f}%  too high {:.1f}%  too low {:.1f}%\n",
                     s.mse, s.mae, 100 * s.frac_correct, 100 * s.frac_higher, 100 * s.frac_lower);
  out << fmt::format("zero-score predictions against nonzero truth: {}\n", s.zero_score_count);
  for (const auto& id : s.zero_score_cases) out << "  " << id << '\n';
}

}  // namespace cvsstext::eval
