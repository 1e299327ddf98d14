#pragma once

// Deterministic, platform-independent PRNG (xoshiro256** seeded via splitmix64).
// All randomness in the library flows through Rng so that runs are reproducible
// bit-for-bit from a u64 seed, independent of standard-library internals.

#include <algorithm>
#include <cstdint>
#include <vector>

namespace gnc {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Unbiased uniform draw from [0, bound). bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// k distinct values from [0, n), ascending order. Floyd's algorithm.
  std::vector<std::uint32_t> sample_distinct(std::uint32_t n, std::uint32_t k);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

inline std::vector<std::uint32_t> Rng::sample_distinct(std::uint32_t n, std::uint32_t k) {
  // Floyd's sampling keeps the draw count at exactly k.
  std::vector<std::uint32_t> out;
  out.reserve(k);
  for (std::uint32_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::uint32_t>(uniform_below(j + 1));
    bool seen = false;
    for (auto v : out) {
      if (v == t) { seen = true; break; }
    }
    out.push_back(seen ? j : t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Stable derivation of independent seed streams from one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_tag) {
  std::uint64_t s = master ^ (0xa0761d6478bd642fULL * (stream_tag + 1));
  splitmix64_next(s);
  return splitmix64_next(s);
}

}  // namespace gnc
