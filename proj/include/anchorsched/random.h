#ifndef ANCHORSCHED_RANDOM_H_
#define ANCHORSCHED_RANDOM_H_

// Seeded random source with distributions written out by hand, so a seed
// produces the same stream on every standard library.

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace anchorsched {

// SplitMix64 finalizer; derives independent sub-seeds.
inline uint64_t MixSeed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64";

  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [lo, hi] by rejection, free of modulo bias.
  int64_t UniformInt(int64_t lo, int64_t hi) {
    const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<int64_t>(Next());
    const uint64_t threshold = (0 - range) % range;
    for (;;) {
      const uint64_t r = Next();
      if (r >= threshold) return lo + static_cast<int64_t>(r % range);
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double UniformReal() {
    return static_cast<double>(Next() >> 11) * 0x1.0p-53;
  }

  bool Bernoulli(double p) { return UniformReal() < p; }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t k = items.size(); k > 1; --k) {
      const size_t pick = static_cast<size_t>(UniformInt(0, static_cast<int64_t>(k) - 1));
      std::swap(items[k - 1], items[pick]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace anchorsched

#endif  // ANCHORSCHED_RANDOM_H_
