#pragma once

#include <cstdint>
#include <random>

namespace stt {

// Uniform doubles from raw engine output. std::uniform_real_distribution is
// not bit-stable across standard library versions, and reproducibility of
// sampled artifacts matters more here than a nanosecond per draw.
inline double u01(std::mt19937_64& g) {
  return double(g() >> 11) * 0x1.0p-53;  // [0, 1)
}

inline double uniform(std::mt19937_64& g, double a, double b) {
  return a + (b - a) * u01(g);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 step; decorrelates per-purpose streams drawn from one master seed
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace stt
