#pragma once

#include <cstdint>
#include <limits>

namespace revaudit::rng {

// SplitMix64 finalizer; used for seed derivation and counter-based bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-seed for (master, stream, index). Streams separate the consumers of a
// single user seed (permutation signs, bootstrap draws, generator stages).
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) noexcept {
  return mix64(mix64(mix64(master) ^ (stream * 0xd1b54a32d192ed03ULL)) ^ index);
}

// Counter-based 64 random bits: word `word` of iteration `iteration`.
constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t iteration, std::uint64_t word) noexcept {
  return mix64(key ^ mix64(iteration * 0x9e3779b97f4a7c15ULL + word));
}

namespace streams {
inline constexpr std::uint64_t permutation = 1;
inline constexpr std::uint64_t bootstrap = 2;
inline constexpr std::uint64_t audit = 3;
inline constexpr std::uint64_t generator = 4;
inline constexpr std::uint64_t corpus = 5;
}  // namespace streams

// xoshiro256** seeded through SplitMix64. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) noexcept {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
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

  // Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace revaudit::rng
