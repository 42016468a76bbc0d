#pragma once

#include <cstdint>
#include <random>

namespace sfcplan {

// splitmix64; used to derive independent seeds for the per-purpose RNG
// streams so that consuming one stream never shifts another.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mixSeed(std::uint64_t base, std::uint64_t salt) {
  return splitmix64(base ^ splitmix64(salt));
}

inline std::mt19937_64 makeRng(std::uint64_t base, std::uint64_t salt) {
  return std::mt19937_64(mixSeed(base, salt));
}

}  // namespace sfcplan
