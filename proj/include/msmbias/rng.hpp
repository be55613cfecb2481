#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace msmbias::rng {

// splitmix64 finalizer: a bijective 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed of substream `index` of stream `stream_key` under `master`. The
// derivation is part of the reproducibility contract; do not change it.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream_key,
                                       std::uint64_t index) noexcept {
  return mix64(mix64(mix64(master) ^ stream_key) ^ mix64(index));
}

using Engine = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

// Uniform on the open interval (0, 1).
inline double uniform_open(Engine& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

inline bool bernoulli(Engine& eng, double p) { return uniform01(eng) < p; }

// Standard normal deviate by inverse transform.
double standard_normal(Engine& eng);

}  // namespace msmbias::rng
