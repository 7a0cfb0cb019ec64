#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace hudn {

// splitmix64 stream. Hand-rolled instead of <random> distributions so that
// sequences are identical across standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

// Deterministic per-subsystem seed derivation from one root seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0);

// k distinct values from {0..n-1}, ascending (selection sampling)
std::vector<int> sample_without_replacement(Rng& rng, int n, int k);

std::vector<int> random_permutation(Rng& rng, int n);

}  // namespace hudn
