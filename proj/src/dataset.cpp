#include "cvsstext/dataset.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "cvsstext/text.hpp"

namespace cvsstext::dataset {

using nlohmann::json;

SourceFilter parse_source_filter(std::string_view s) {
  if (s == "all") return SourceFilter::All;
  if (s == "descriptions") return SourceFilter::Descriptions;
  if (s == "scraped") return SourceFilter::Scraped;
  throw std::invalid_argument("unknown source filter '" + std::string(s) +
                              "' (expected all, descriptions or scraped)");
}

std::string_view to_string(SourceFilter f) noexcept {
  switch (f) {
    case SourceFilter::All: return "all";
    case SourceFilter::Descriptions: return "descriptions";
    case SourceFilter::Scraped: return "scraped";
  }
  return "all";
}

std::vector<LabeledExample> build_corpus(const std::vector<nvd::VulnEntry>& entries,
                                         const std::vector<scrape::ScrapedText>& scraped,
                                         const BuildOptions& options, BuildReport* report) {
  BuildReport rep;
  std::vector<LabeledExample> out;
  std::unordered_map<std::string, const nvd::VulnEntry*> truth;
  for (const auto& e : entries) {
    if (e.gt_vector) truth.emplace(e.cve_id, &e);
  }
  std::unordered_set<std::string> seen;  // cve_id + '\n' + text
  auto keep = [&](const LabeledExample& ex) {
    if (!options.drop_exact_duplicates) return true;
    if (seen.insert(ex.cve_id + '\n' + ex.text).second) return true;
    ++rep.duplicates_dropped;
    return false;
  };

  if (options.sources != SourceFilter::Scraped) {
    for (const auto& e : entries) {
      if (!e.gt_vector) continue;
      if (text::trim(e.description).empty()) {
        ++rep.empty_skipped;
        continue;
      }
      LabeledExample ex{e.cve_id, std::string(kDescriptionRef), e.description,
                        SourceKind::NvdDescription, "", *e.gt_vector};
      if (keep(ex)) {
        out.push_back(std::move(ex));
        ++rep.descriptions;
      }
    }
  }
  if (options.sources != SourceFilter::Descriptions) {
    for (const auto& t : scraped) {
      const auto it = truth.find(t.cve_id);
      if (it == truth.end()) {
        spdlog::warn("orphan scraped text for {} ({}): no ground truth", t.cve_id, t.origin_url);
        ++rep.orphan_texts;
        continue;
      }
      if (text::trim(t.text).empty()) {
        ++rep.empty_skipped;
        continue;
      }
      LabeledExample ex{t.cve_id, t.origin_url.empty() ? t.url : t.origin_url, t.text,
                        SourceKind::ScrapedReference, t.domain, *it->second->gt_vector};
      if (keep(ex)) {
        out.push_back(std::move(ex));
        ++rep.scraped;
      }
    }
  }
  if (rep.orphan_texts) spdlog::warn("{} orphan scraped texts skipped", rep.orphan_texts);
  if (report) *report = rep;
  return out;
}

namespace {

std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - kMax % n;
  std::uint64_t x;
  do {
    x = g();
  } while (x >= limit);
  return x % n;
}

}  // namespace

void shuffle(std::vector<std::string>& items, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded(g, i));
    std::swap(items[i - 1], items[j]);
  }
}

bool SplitManifest::in_test(const std::string& cve_id) const {
  return std::binary_search(test.begin(), test.end(), cve_id);
}

bool SplitManifest::in_train(const std::string& cve_id) const {
  return std::binary_search(train.begin(), train.end(), cve_id);
}

SplitManifest grouped_split(const std::vector<LabeledExample>& corpus, double ratio,
                            std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("split ratio must lie in (0, 1)");
  }
  if (corpus.empty()) throw EmptyCorpus("cannot split an empty corpus");

  std::map<std::string, std::size_t> texts;
  for (const auto& ex : corpus) ++texts[ex.cve_id];
  std::vector<std::string> ids;
  ids.reserve(texts.size());
  for (const auto& [id, n] : texts) ids.push_back(id);
  shuffle(ids, seed);

  SplitManifest m;
  m.seed = seed;
  m.ratio = ratio;
  const double target = ratio * static_cast<double>(corpus.size());
  for (const auto& id : ids) {
    const auto n = texts[id];
    if (static_cast<double>(m.train_texts) < target) {
      m.train.push_back(id);
      m.train_texts += n;
    } else {
      m.test.push_back(id);
      m.test_texts += n;
    }
  }
  std::sort(m.train.begin(), m.train.end());
  std::sort(m.test.begin(), m.test.end());
  if (m.test.empty()) spdlog::warn("split left the test set empty ({} CVE ids)", ids.size());
  return m;
}

double CorpusSummary::fraction(cvss::Component c, char value) const {
  if (!examples) return 0.0;
  const auto& counts = label_counts[static_cast<std::size_t>(c)];
  const auto it = counts.find(value);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / examples;
}

CorpusSummary corpus_stats(const std::vector<LabeledExample>& corpus) {
  if (corpus.empty()) throw EmptyInput("corpus statistics need at least one example");
  CorpusSummary s;
  std::vector<std::size_t> lengths;
  lengths.reserve(corpus.size());
  for (const auto& ex : corpus) {
    lengths.push_back(text::scalar_count(ex.text));
    for (const auto c : cvss::kComponents) {
      ++s.label_counts[static_cast<std::size_t>(c)][ex.labels.letter(c)];
    }
  }
  s.lengths = length_stats(lengths);
  s.examples = corpus.size();
  return s;
}

json to_json(const LabeledExample& e) {
  json j{{"cve_id", e.cve_id},
         {"text_ref", e.text_ref},
         {"source", e.source == SourceKind::NvdDescription ? "nvd_description" : "scraped_reference"}};
  if (e.source == SourceKind::ScrapedReference) j["domain"] = e.domain;
  j["labels"] = cvss::to_string(e.labels);
  j["text"] = e.text;
  return j;
}

LabeledExample example_from_json(const json& j) {
  LabeledExample e;
  e.cve_id = j.at("cve_id").get<std::string>();
  e.text_ref = j.at("text_ref").get<std::string>();
  e.text = j.at("text").get<std::string>();
  const auto source = j.at("source").get<std::string>();
  if (source == "nvd_description") {
    e.source = SourceKind::NvdDescription;
  } else if (source == "scraped_reference") {
    e.source = SourceKind::ScrapedReference;
    e.domain = j.value("domain", "");
  } else {
    throw nvd::SchemaError(e.cve_id + ": unknown source '" + source + "'");
  }
  e.labels = cvss::parse_vector(j.at("labels").get<std::string>());
  return e;
}

json to_json(const SplitManifest& m) {
  return json{{"seed", m.seed},
              {"ratio", m.ratio},
              {"train_texts", m.train_texts},
              {"test_texts", m.test_texts},
              {"train", m.train},
              {"test", m.test}};
}

SplitManifest manifest_from_json(const json& j) {
  SplitManifest m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.ratio = j.at("ratio").get<double>();
  m.train = j.at("train").get<std::vector<std::string>>();
  m.test = j.at("test").get<std::vector<std::string>>();
  m.train_texts = j.value("train_texts", std::size_t{0});
  m.test_texts = j.value("test_texts", std::size_t{0});
  std::sort(m.train.begin(), m.train.end());
  std::sort(m.test.begin(), m.test.end());
  std::vector<std::string> both;
  std::set_intersection(m.train.begin(), m.train.end(), m.test.begin(), m.test.end(),
                        std::back_inserter(both));
  if (!both.empty()) throw nvd::SchemaError("manifest lists " + both.front() + " in train and test");
  return m;
}

json to_json(const CorpusSummary& s) {
  json labels = json::object();
  for (const auto c : cvss::kComponents) {
    json dist = json::object();
    for (const auto& [value, n] : s.label_counts[static_cast<std::size_t>(c)]) {
      dist[std::string(1, value)] = {{"count", n}, {"fraction", s.fraction(c, value)}};
    }
    labels[std::string(cvss::component_name(c))] = dist;
  }
  return json{{"examples", s.examples}, {"lengths", to_json(s.lengths)}, {"labels", labels}};
}

void write_corpus_jsonl(std::ostream& out, const std::vector<LabeledExample>& corpus) {
  for (const auto& e : corpus) out << to_json(e).dump() << '\n';
}

std::vector<LabeledExample> read_corpus_jsonl(std::istream& in) {
  std::vector<LabeledExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(example_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw nvd::SchemaError("corpus line " + std::to_string(lineno) + ": " + e.what());
    } catch (const cvss::VectorError& e) {
      throw nvd::SchemaError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cvsstext::dataset
