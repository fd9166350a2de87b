#include "regbench/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace regbench {

uint64_t SplitMix64::next_below(uint64_t bound) {
  if (bound == 0) throw std::runtime_error("rng: zero bound");
  uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

void fisher_yates_shuffle(std::vector<size_t>& values, SplitMix64& rng) {
  for (size_t i = values.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(values[i - 1], values[j]);
  }
}

std::vector<size_t> sample_without_replacement(size_t n, size_t count, SplitMix64& rng) {
  if (count > n) throw std::runtime_error("rng: sample larger than population");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first `count` slots end up uniformly sampled.
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + static_cast<size_t>(rng.next_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace regbench
