#pragma once

#include <cstdint>
#include <random>

namespace p2pbandit {

using Rng = std::mt19937_64;

/// Purpose tags keep the environment's draws independent of the protocol
/// being simulated, so two protocols run with one seed see identical
/// contexts and noise.
enum class StreamTag : std::uint64_t {
  kProblem = 1,
  kContexts = 2,
  kNoise = 3,
  kPermutation = 4,
  kTest = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent generator for one (seed, agent, round, purpose) tuple.
inline Rng make_stream(std::uint64_t seed, std::uint64_t agent, std::uint64_t round,
                       StreamTag tag) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
  h = splitmix64(h ^ agent);
  h = splitmix64(h ^ (round * 0x632be59bd9b4e019ULL));
  return Rng(h);
}

}  // namespace p2pbandit
