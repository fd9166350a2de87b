#pragma once

#include <cstdint>
#include <vector>

namespace regbench {

// SplitMix64: the fully specified 64-bit-state generator behind every
// seeded decision (fold shuffles, boosting subsamples), so runs are portable
// across platforms and independent of any standard-library engine.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Unbiased draw in [0, bound) by rejection.
  uint64_t next_below(uint64_t bound);

  double next_double() { return (next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

void fisher_yates_shuffle(std::vector<size_t>& values, SplitMix64& rng);

// First `count` entries of a shuffled copy of 0..n-1 (sampling without
// replacement), returned in ascending order.
std::vector<size_t> sample_without_replacement(size_t n, size_t count, SplitMix64& rng);

}  // namespace regbench
