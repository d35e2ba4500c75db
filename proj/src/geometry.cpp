#include "lft/geometry.hpp"

#include <stdexcept>
#include <string>

namespace lft {

Box build_box(int d, int l, long site_cap) {
  if (d < 1 || d > max_dim) throw std::invalid_argument("box dimension must be 1..3");
  if (l < 0) throw std::invalid_argument("box half-side must be >= 0");
  Box b;
  b.d = d;
  b.l = l;
  b.side = 2 * l + 1;
  b.n = 1;
  for (int k = 0; k < d; ++k) {
    b.n *= b.side;
    if (b.n > site_cap)
      throw std::length_error("box capacity exceeded: (2*" + std::to_string(l) + "+1)^" +
                              std::to_string(d) + " > " + std::to_string(site_cap) + " sites");
  }
  return b;
}

std::vector<Bond> nearest_bonds(const Box& ambient, const Box& window) {
  if (window.d != ambient.d) throw std::invalid_argument("window/ambient dimension mismatch");
  if (window.l > ambient.l) throw std::invalid_argument("window exceeds ambient box");
  std::vector<Bond> bonds;
  bonds.reserve(static_cast<size_t>(window.n) * window.d);
  for (long i = 0; i < window.n; ++i) {
    const Site x = window.site(i);
    for (int k = 0; k < window.d; ++k) {
      const Site y = shifted(x, k);
      if (!ambient.contains(y)) continue;
      bonds.push_back(Bond{y, x, k});
    }
  }
  return bonds;
}

std::vector<BondPair> bond_list(const Box& box, BondMode mode) {
  std::vector<BondPair> pairs;
  pairs.reserve(static_cast<size_t>(box.n) * box.d * 2);
  for (long i = 0; i < box.n; ++i) {
    const Site x = box.site(i);
    for (int k = 0; k < box.d; ++k) {
      for (int step : {+1, -1}) {
        const Site y = shifted(x, k, step);
        if (box.contains(y)) {
          pairs.push_back(BondPair{x, y});  // its reverse shows up from y's loop
        } else if (mode == BondMode::crossing) {
          pairs.push_back(BondPair{x, y});
          pairs.push_back(BondPair{y, x});
        }
      }
    }
  }
  return pairs;
}

}  // namespace lft
