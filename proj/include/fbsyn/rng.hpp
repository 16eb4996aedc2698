#ifndef FBSYN_RNG_HPP
#define FBSYN_RNG_HPP

#include <cstdint>

namespace fbsyn {

/// Splitmix64 generator. Used instead of <random> engines so that seeded
/// draws are bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

}  // namespace fbsyn

#endif
