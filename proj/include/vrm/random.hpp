#pragma once

#include <cstdint>
#include <random>

namespace vrm {

// Every stochastic routine in the library draws from this engine. The
// engine's output sequence is fixed by the standard, so equal seeds give
// equal streams on every conforming implementation.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for an independent sub-stream (anchor, hypothesis, restart, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

/// Seed of trial `trial` in a repeated experiment.
constexpr std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  return seed + trial;
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Beta(a, b) as G_a / (G_a + G_b) with independent unit-scale gammas.
inline double beta_draw(Rng& rng, double a, double b) {
  const double ga = std::gamma_distribution<double>(a, 1.0)(rng);
  const double gb = std::gamma_distribution<double>(b, 1.0)(rng);
  const double total = ga + gb;
  // Both gammas underflow only for tiny shapes; fall back to a fair coin.
  if (total <= 0.0) return uniform01(rng) < 0.5 ? 0.0 : 1.0;
  return ga / total;
}

}  // namespace vrm
