#pragma once

#include <cstdint>
#include <limits>

namespace smoothtwin {

/// SplitMix64: a counter-based generator, so independent streams are just
/// different starting counters derived from one seed.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Generator for sub-stream `index`, independent of how many values this one produced.
  SplitMix64 split(std::uint64_t index) const {
    SplitMix64 g(state_ ^ (0x6a09e667f3bcc909ULL + index * 0xd1b54a32d192ed03ULL));
    g();
    return SplitMix64(g());
  }

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v;
    do v = (*this)(); while (v >= limit);
    return v % n;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace smoothtwin
