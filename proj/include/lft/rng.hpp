#pragma once
#include <cstdint>

#include "lft/geometry.hpp"

namespace lft {

// Counter-based randomness: every drawn number is a pure hash of
// (master seed, realization index, site coordinates). Growing the box or
// changing the iteration order never reshuffles values at existing sites.
namespace rng {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline uint64_t zigzag(int v) {
  const auto s = static_cast<int64_t>(v);
  return static_cast<uint64_t>((s << 1) ^ (s >> 63));
}

inline uint64_t site_counter(uint64_t seed, uint64_t realization, const Site& x) {
  uint64_t h = splitmix64(seed ^ 0x6c62272e07bb0142ULL);
  h = splitmix64(h ^ realization);
  for (int k = 0; k < max_dim; ++k) h = splitmix64(h ^ (zigzag(x[k]) + 0x100000001b3ULL * static_cast<uint64_t>(k + 1)));
  return h;
}

// uniform in [0, 1)
inline double to_unit(uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace rng
}  // namespace lft
