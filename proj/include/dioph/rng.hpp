#pragma once

#include <cstdint>

namespace dioph {

// Seeded generator with cheap per-index substreams. Outputs are fully
// determined by (seed, index, step), independent of platform and thread
// schedule, which is what keeps reports byte-identical across --jobs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Dyadic rational in [0,1) with a 53-bit numerator (exactly a double).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// 53-bit numerator of next_unit; the value is numerator / 2^53.
  std::uint64_t next_unit_numerator() { return next() >> 11; }

  /// Independent substream for a sample index.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 mixer(seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
    return SplitMix64(mixer.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace dioph
