#include <doctest.h>

#include <algorithm>
#include <set>

#include "lft/geometry.hpp"

using namespace lft;

TEST_CASE("box indexing is a bijection onto 0..n-1") {
  for (int d = 1; d <= 3; ++d) {
    const Box box = build_box(d, 2);
    CHECK(box.side == 5);
    long expect = 1;
    for (int k = 0; k < d; ++k) expect *= 5;
    CHECK(box.n == expect);
    std::set<long> seen;
    for (long i = 0; i < box.n; ++i) {
      const Site x = box.site(i);
      CHECK(box.contains(x));
      CHECK(box.index(x) == i);
      seen.insert(i);
    }
    CHECK(static_cast<long>(seen.size()) == box.n);
  }
}

TEST_CASE("unused coordinates stay zero below the dimension") {
  const Box box = build_box(2, 3);
  for (long i = 0; i < box.n; ++i) CHECK(box.site(i)[2] == 0);
}

TEST_CASE("contains rejects sites outside the half-side") {
  const Box box = build_box(2, 1);
  CHECK(box.contains(Site{1, -1, 0}));
  CHECK(!box.contains(Site{2, 0, 0}));
  CHECK(!box.contains(Site{0, -2, 0}));
}

TEST_CASE("build_box validates arguments and site budget") {
  CHECK_THROWS(build_box(0, 1));
  CHECK_THROWS(build_box(4, 1));
  CHECK_THROWS(build_box(1, -1));
  CHECK_THROWS(build_box(3, 100));          // 201^3 sites blows the default cap
  CHECK_NOTHROW(build_box(3, 100, 9000000));
}

TEST_CASE("shifted moves one coordinate by the given step") {
  const Site x{1, -2, 0};
  CHECK(shifted(x, 0) == Site{2, -2, 0});
  CHECK(shifted(x, 1, -3) == Site{1, -5, 0});
  CHECK(shifted(x, 2) == Site{1, -2, 1});
}

TEST_CASE("nearest_bonds enumerates tails in the window with heads in the ambient box") {
  const Box amb = build_box(1, 2);
  const Box win = build_box(1, 1);

  const std::vector<Bond> tails_in = nearest_bonds(amb, win);
  // tails -1,0,1, heads 0,1,2: all heads inside the 5-site ambient box
  CHECK(tails_in.size() == 3);
  for (const Bond& b : tails_in) {
    CHECK(b.k == 0);
    CHECK(b.head == shifted(b.tail, 0));
    CHECK(win.contains(b.tail));
    CHECK(amb.contains(b.head));
  }

  const std::vector<Bond> interior = nearest_bonds(win, win);
  CHECK(interior.size() == 2);  // (0,-1) and (1,0)
  for (const Bond& b : interior) {
    CHECK(win.contains(b.tail));
    CHECK(win.contains(b.head));
  }

  const std::vector<Bond> open = nearest_bonds(amb);
  CHECK(open.size() == 4);  // 5 sites, head clipped at the boundary
}

TEST_CASE("nearest_bonds counts match d * side^(d-1) * (side-1) on the full box") {
  for (int d = 1; d <= 3; ++d) {
    const Box box = build_box(d, 2);
    const long per_axis = box.n / box.side * (box.side - 1);
    CHECK(static_cast<long>(nearest_bonds(box).size()) == d * per_axis);
  }
}

TEST_CASE("bond_list produces ordered pairs in both orientations") {
  const Box win = build_box(1, 1);

  const std::vector<BondPair> interior = bond_list(win, BondMode::interior);
  CHECK(interior.size() == 4);  // two undirected interior bonds, both orders
  for (const BondPair& p : interior) {
    CHECK(win.contains(p.a));
    CHECK(win.contains(p.b));
    CHECK((p.a == shifted(p.b, 0) || p.b == shifted(p.a, 0)));
  }
  // both orientations present
  CHECK(std::any_of(interior.begin(), interior.end(),
                    [](const BondPair& p) { return p.a[0] < p.b[0]; }));
  CHECK(std::any_of(interior.begin(), interior.end(),
                    [](const BondPair& p) { return p.a[0] > p.b[0]; }));

  // crossing mode keeps interior pairs and adds boundary-crossing ones
  const std::vector<BondPair> crossing = bond_list(win, BondMode::crossing);
  CHECK(crossing.size() == 8);
  long n_cross = 0;
  for (const BondPair& p : crossing)
    if (win.contains(p.a) != win.contains(p.b)) ++n_cross;
  CHECK(n_cross == 4);  // partners at -2 and +2, both orders

  const Box win2 = build_box(2, 1);
  CHECK(bond_list(win2, BondMode::interior).size() == 24);  // 12 undirected bonds
  CHECK(bond_list(win2, BondMode::crossing).size() == 48);  // + 3 per side, 4 sides, 2 orders
}
