#pragma once

#include <cstdint>
#include <random>

namespace cav {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based stream split: the seed of stream (s0, s1, s2) does not depend
// on how many sibling streams exist.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t s0,
                                 std::uint64_t s1 = 0, std::uint64_t s2 = 0) {
  return mix64(mix64(mix64(master ^ mix64(s0)) ^ mix64(s1 + 0x51ed2701)) ^
               mix64(s2 + 0xb7e15163));
}

inline std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t s0,
                                   std::uint64_t s1 = 0, std::uint64_t s2 = 0) {
  return std::mt19937_64(stream_seed(master, s0, s1, s2));
}

}  // namespace cav
