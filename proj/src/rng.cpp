#include "hudn/rng.hpp"

#include "hudn/io_util.hpp"

#include <string>

namespace hudn {

std::uint64_t Rng::below(std::uint64_t n) {
  // rejection sampling to avoid modulo bias
  std::uint64_t threshold = (0ULL - n) % n;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t a,
                          std::uint64_t b) {
  std::uint64_t h = fnv1a64(tag);
  Rng mix(root ^ h);
  mix.next_u64();
  Rng mix2(mix.next_u64() ^ (a * 0x9e3779b97f4a7c15ULL) ^ (b + 0x517cc1b727220a95ULL));
  mix2.next_u64();
  return mix2.next_u64();
}

std::vector<int> sample_without_replacement(Rng& rng, int n, int k) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k > 0 ? k : 0));
  int remaining = k;
  for (int i = 0; i < n && remaining > 0; ++i) {
    if (rng.below(static_cast<std::uint64_t>(n - i)) < static_cast<std::uint64_t>(remaining)) {
      out.push_back(i);
      --remaining;
    }
  }
  return out;
}

std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(j)]);
  }
  return p;
}

}  // namespace hudn
