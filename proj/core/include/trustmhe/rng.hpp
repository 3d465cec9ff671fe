#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace trustmhe {

// splitmix64 finalizer. Used to derive well-separated substream seeds from
// one master seed so that runs are reproducible regardless of module
// evaluation order.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

enum class Stream : std::uint64_t {
  planner = 1,
  traffic = 2,
  oracle_noise = 3,
  modality_shape = 4,
  scenario_jitter = 5,
};

// Independent generator for (master seed, stream, index). `index` commonly
// packs an agent id and a tick so per-agent noise is stable under
// reordering of agents within a tick.
inline std::mt19937_64 substream(std::uint64_t master, Stream stream, std::uint64_t index = 0) {
  const std::uint64_t a = mix64(master ^ 0xD1B54A32D192ED03ull);
  const std::uint64_t b = mix64(a ^ static_cast<std::uint64_t>(stream));
  return std::mt19937_64(mix64(b ^ index));
}

inline std::uint64_t agent_tick_index(int agent_id, std::int64_t tick) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(agent_id)) << 32) ^
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(tick));
}

// 53-bit uniform in [0, 1). Bit-exact across standard libraries, unlike
// std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Standard normal via Box-Muller, one value per call so no hidden state
// leaks between callers. Two raw draws are consumed per sample.
inline double gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace trustmhe
