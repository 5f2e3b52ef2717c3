#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace timexplain {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a path of
/// integers (stream tag, environment index, run index, ...) via splitmix64.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t state = mix(base);
  for (auto v : path) state = mix(state ^ mix(v));
  return state;
}

namespace seed_stream {
inline constexpr std::uint64_t kReplacement = 1;
inline constexpr std::uint64_t kCoalitions = 2;
inline constexpr std::uint64_t kDraws = 3;
}  // namespace seed_stream

}  // namespace timexplain
