#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace hising {

// One splitmix64 step. Used to expand seeds and derive child streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child seed from a parent seed and an integer key.
// Chaining calls gives a seed tree: adding keys never perturbs siblings.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) {
  std::uint64_t s = parent;
  std::uint64_t h = splitmix64(s);
  s = h ^ (key * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

// xoshiro256++ (Blackman & Vigna). State is seeded through splitmix64 so
// any 64-bit seed, including 0, yields a valid nonzero state. All draws
// below are implemented from raw bits only, so streams are reproducible
// across platforms and standard library versions.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Fixed-point multiply keeps the map
  // deterministic; the O(bound / 2^64) bias is irrelevant at our scales.
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

  // +1 with probability p, else -1.
  int spin(double p) { return uniform01() < p ? 1 : -1; }

  // Standard normal via the Marsaglia polar method (no libm distribution,
  // so draws are bit-stable everywhere). Second variate is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, q;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double r = std::sqrt(-2.0 * std::log(q) / q);
    spare_ = v * r;
    have_spare_ = true;
    return u * r;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hising
