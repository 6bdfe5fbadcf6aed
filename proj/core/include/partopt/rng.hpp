#ifndef PARTOPT_RNG_HPP
#define PARTOPT_RNG_HPP

#include <cstdint>

namespace partopt {

// splitmix64 (Steele, Lea, Flood 2014). chosen because the whole state is one
// 64-bit word, the update is three xor-shift-multiplies, and the output stream
// for a given seed is identical on every platform/compiler -- instances
// generated from a seed must reproduce bit-for-bit everywhere.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // unbiased draw from {0, ..., n-1} by rejection (n > 0).
  // std::uniform_int_distribution is implementation-defined, so not used.
  std::uint64_t bounded(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // inclusive integer range
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(bounded(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // 53-bit mantissa uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace partopt

#endif
