#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace cbcw {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for task `index` under master `seed`. Used for
// bootstrap replicates and generator restarts so parallel execution and
// serial execution draw identical streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// Deterministic random source. All draws go through uniform01() so results
// are reproducible across platforms (mt19937_64 output is standardized,
// std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0,1), 53-bit resolution.
  double uniform01() {
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
  }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    const auto k = static_cast<std::size_t>(uniform01() * static_cast<double>(n));
    return std::min(k, n - 1);
  }

  bool coin() { return uniform01() < 0.5; }

  // Standard Gumbel (location 0, scale 1) draw.
  double gumbel() { return -std::log(-std::log(uniform01())); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cbcw
