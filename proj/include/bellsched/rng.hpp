#pragma once

#include <cstdint>
#include <random>

namespace bellsched {

// Portable random source for instance generation.
//
// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
// standard. Range reduction is done here (rejection sampling on the top
// bits) because std::uniform_int_distribution is implementation-defined and
// would make instances differ between standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full range
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span + 1) % span;
    std::uint64_t draw = next();
    while (draw > limit) draw = next();
    return lo + static_cast<std::int64_t>(draw % span);
  }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bellsched
