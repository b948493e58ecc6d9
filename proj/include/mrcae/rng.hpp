#pragma once

#include <cstdint>
#include <random>

namespace mrcae {

/// Deterministic random stream. All randomness in the library flows through
/// one of these so a run is reproducible from its seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform integer in [0, n). Modulo bias is irrelevant at our scales.
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

 private:
  std::mt19937_64 eng_;
};

/// Derives an independent stream seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace mrcae
