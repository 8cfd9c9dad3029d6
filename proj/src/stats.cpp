#include "cvsstext/stats.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <numeric>

namespace cvsstext {

std::size_t nearest_rank(std::span<const std::size_t> sorted, double p) {
  if (sorted.empty()) throw EmptyInput("percentile of empty sequence");
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

CorpusStats length_stats(std::span<const std::size_t> lengths, std::size_t bucket_width) {
  if (lengths.empty()) throw EmptyInput("length statistics need at least one text");
  if (bucket_width == 0) bucket_width = 1;

  std::vector<std::size_t> sorted(lengths.begin(), lengths.end());
  std::sort(sorted.begin(), sorted.end());

  CorpusStats s;
  s.count = sorted.size();
  // Sum in integers so the mean does not depend on input order.
  const auto total = std::accumulate(sorted.begin(), sorted.end(), std::uint64_t{0});
  s.mean_len = static_cast<double>(total) / static_cast<double>(s.count);
  s.median_len = lower_median(sorted);
  s.min_len = sorted.front();
  s.max_len = sorted.back();
  s.p95_len = nearest_rank(sorted, 95.0);
  s.bucket_width = bucket_width;
  s.histogram.assign(s.max_len / bucket_width + 1, 0);
  for (std::size_t len : sorted) ++s.histogram[len / bucket_width];
  return s;
}

nlohmann::json to_json(const CorpusStats& s) {
  return nlohmann::json{{"count", s.count},       {"mean", s.mean_len},
                        {"median", s.median_len}, {"min", s.min_len},
                        {"max", s.max_len},       {"p95", s.p95_len},
                        {"bucket_width", s.bucket_width}, {"histogram", s.histogram}};
}

}  // namespace cvsstext
