#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace cvsstext {

class EmptyInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Character-length statistics over a text collection.
struct CorpusStats {
  std::size_t count = 0;
  double mean_len = 0.0;
  std::size_t median_len = 0;  // lower middle element for even counts
  std::size_t min_len = 0;
  std::size_t max_len = 0;
  std::size_t p95_len = 0;     // nearest-rank percentile
  std::size_t bucket_width = 0;
  std::vector<std::size_t> histogram;  // histogram[k] counts [k*w, (k+1)*w)
};

/// Throws EmptyInput when `lengths` is empty.
CorpusStats length_stats(std::span<const std::size_t> lengths,
                         std::size_t bucket_width = 100);

/// Nearest-rank percentile (p in (0, 100]) of an ascending-sorted sequence.
std::size_t nearest_rank(std::span<const std::size_t> sorted, double p);

/// Lower median of an ascending-sorted sequence.
inline std::size_t lower_median(std::span<const std::size_t> sorted) {
  return sorted[(sorted.size() - 1) / 2];
}

nlohmann::json to_json(const CorpusStats& s);

}  // namespace cvsstext
