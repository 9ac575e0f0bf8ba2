#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tvkde {

//! SplitMix64 finalizer; decorrelates nearby seeds.
constexpr std::uint64_t
splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! FNV-1a, used to name random substreams and to hash configurations.
constexpr std::uint64_t
fnv1a(std::string_view text, std::uint64_t hash = 0xcbf29ce484222325ULL)
{
  for (char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

//! Independent generator for substream (`name`, `index`) of a master seed.
inline std::mt19937_64
make_stream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0)
{
  const std::uint64_t key = splitmix64(splitmix64(seed ^ fnv1a(name)) + index);
  std::seed_seq seq{ static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32) };
  return std::mt19937_64(seq);
}

} // namespace tvkde
