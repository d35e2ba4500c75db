#pragma once
#include <array>
#include <vector>

namespace lft {

// Sites carry up to three integer coordinates; coordinates beyond the
// dimension in use stay zero so a Site can be hashed/compared uniformly.
using Site = std::array<int, 3>;
inline constexpr int max_dim = 3;
inline constexpr long default_site_cap = 4'000'000;

// Centered cube {-l,...,l}^d with row-major flattening. `index` and `site`
// are inverse bijections between sites and [0, n).
struct Box {
  int d = 1;
  int l = 0;
  int side = 1;   // 2l + 1
  long n = 1;     // side^d

  bool contains(const Site& x) const {
    for (int k = 0; k < d; ++k)
      if (x[k] < -l || x[k] > l) return false;
    return true;
  }
  long index(const Site& x) const {
    long idx = 0;
    for (int k = 0; k < d; ++k) idx = idx * side + (x[k] + l);
    return idx;
  }
  Site site(long idx) const {
    Site x{0, 0, 0};
    for (int k = d - 1; k >= 0; --k) {
      x[k] = static_cast<int>(idx % side) - l;
      idx /= side;
    }
    return x;
  }
};

// l = 0 (a single site) is allowed internally; run configs require l >= 1.
Box build_box(int d, int l, long site_cap = default_site_cap);

inline Site shifted(Site x, int k, int step = 1) {
  x[k] += step;
  return x;
}

// Directed nearest-neighbour bond head = tail + e_k. Current observables
// attach to the ordered pair (head, tail).
struct Bond {
  Site head{0, 0, 0};
  Site tail{0, 0, 0};
  int k = 0;
};

// All bonds (x + e_k, x) with tail x in `window` and head inside `ambient`.
// With window == ambient this is exactly the bond set of the open-boundary
// Laplacian; a window with margin inside the ambient box loses no bond.
std::vector<Bond> nearest_bonds(const Box& ambient, const Box& window);
inline std::vector<Bond> nearest_bonds(const Box& box) { return nearest_bonds(box, box); }

// Undirected bond set as ordered pairs (a, b), |a - b| = 1, each unordered
// pair in both orientations. interior: both endpoints in the box; crossing:
// at least one endpoint in the box.
enum class BondMode { interior, crossing };
struct BondPair {
  Site a{0, 0, 0};
  Site b{0, 0, 0};
};
std::vector<BondPair> bond_list(const Box& box, BondMode mode);

}  // namespace lft
