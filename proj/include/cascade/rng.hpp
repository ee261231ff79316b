#ifndef CASCADE_RNG_HPP
#define CASCADE_RNG_HPP

#include <cstdint>
#include <random>

namespace cascade {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the private stream for trial `trial` under base seed `seed`.
/// A pure function of the pair, so adding trials never perturbs existing ones.
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x632BE59BD9B4E019ULL));
}

inline Engine make_stream(std::uint64_t seed, std::uint64_t trial) {
  return Engine{derive_stream_seed(seed, trial)};
}

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
/// unlike std::uniform_real_distribution.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Rng>
bool bernoulli(Rng& rng, double p) {
  return uniform01(rng) < p;
}

}  // namespace cascade

#endif  // CASCADE_RNG_HPP
