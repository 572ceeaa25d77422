#pragma once

// Counter-based pseudo-random streams. Every draw is a pure function of
// (key, counter), so labels attached to group elements stay identical when a
// window is enlarged or recentered, and parallel trials can own disjoint
// streams without shared state.

#include <cstdint>
#include <initializer_list>

namespace esmlab {

// splitmix64 finalizer (Steele-Lea-Flood); full 64-bit avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Order-sensitive key derivation: key_of(a,b) != key_of(b,a).
constexpr std::uint64_t key_of(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t k = 0x2545f4914f6cdd1dull;
  for (std::uint64_t p : parts) k = mix64(k ^ (p + 0x9e3779b97f4a7c15ull + (k << 6) + (k >> 2)));
  return k;
}

// Stateless stream: word(i) is independent of how many words were read before.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t word(std::uint64_t index) const { return mix64(key_ ^ mix64(index + 1)); }

  std::uint64_t next() { return word(ctr_++); }

  // Uniform in [0,1), 53-bit mantissa.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static double to_unit(std::uint64_t w) { return static_cast<double>(w >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, bound) by rejection on the top bits.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t w;
    do { w = next(); } while (w >= limit);
    return w % bound;
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace esmlab
