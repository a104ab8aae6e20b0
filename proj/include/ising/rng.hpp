#pragma once
// Counter-based RNG: every draw is a pure hash of (seed, stream, counter pair).
// Draws are reproducible bit-for-bit for any thread count and any evaluation
// order, which is what makes --threads invisible in every output.
#include <cstdint>

namespace ising {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Stafford mix13): full-avalanche bijection on 64 bits.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (stream + kGolden));
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + kGolden));
  return h;
}

// uniform double in [0, 1) with 53 random bits
inline double rng_uniform(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t a, std::uint64_t b) {
  return static_cast<double>(rng_word(seed, stream, a, b) >> 11) * 0x1.0p-53;
}

// convenience sequential view over one (seed, stream) lane
struct SequenceRng {
  std::uint64_t seed = 0, stream = 0, ctr = 0;
  SequenceRng(std::uint64_t s, std::uint64_t st) : seed(s), stream(st) {}
  std::uint64_t next_word() { return rng_word(seed, stream, ctr++, 0); }
  double uniform() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }
  // uniform integer in [0, n) by rejection-free 128-bit multiply
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_word()) * n) >> 64);
  }
};

}  // namespace ising
