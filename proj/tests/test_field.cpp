#include <doctest.h>

#include <cmath>
#include <functional>

#include "lft/field.hpp"

using namespace lft;

namespace {

// dense Simpson rule for line-integral cross-checks
double simpson01(const std::function<double(double)>& f, int panels) {
  double s = f(0.0) + f(1.0);
  for (int j = 1; j < 2 * panels; ++j) {
    const double a = 0.5 * j / panels;
    s += (j % 2 ? 4.0 : 2.0) * f(a);
  }
  return s / (6.0 * panels);
}

}  // namespace

TEST_CASE("bump-derivative pulse: primitive is the mollifier bump") {
  const Pulse p = make_bump_derivative_pulse(0.25, 1.75);
  CHECK(p.ac);
  CHECK(p.A(0.25) == 0.0);
  CHECK(p.A(0.1) == 0.0);
  CHECK(p.A(1.75) == 0.0);
  CHECK(p.A(5.0) == 0.0);
  CHECK(p.A(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(p.max_abs_A() == std::exp(-1.0));
  CHECK(p.E(0.25) == 0.0);
  CHECK(p.E(1.75) == 0.0);
  // E is odd about the midpoint
  CHECK(p.E(1.0 - 0.3) == doctest::Approx(-p.E(1.0 + 0.3)).epsilon(1e-12));

  // the primitive really integrates E
  const int n = 4000;
  double acc = 0;
  const double h = 1.5 / n;
  for (int j = 0; j < n; ++j) acc += h * 0.5 * (p.E(0.25 + j * h) + p.E(0.25 + (j + 1) * h));
  CHECK(std::abs(acc - p.A_end()) < 1e-9);

  // the primitive settles below tolerance strictly before the support ends
  const double t1 = check_ac(p);
  CHECK(t1 < 1.75);
  CHECK(t1 > 0.25 + 0.95 * 1.5);
}

TEST_CASE("halfwave pulse never settles back to zero") {
  const Pulse p = make_halfwave_pulse(0.0, 2.0);
  CHECK(!p.ac);
  CHECK(p.A_end() == doctest::Approx(1.0).epsilon(1e-13));  // int sin^2 = span/2
  CHECK(p.A(10.0) == p.A_end());                            // constant after support
  CHECK(check_ac(p) == never_ac);
  for (double t : {0.1, 0.5, 1.3, 1.9}) CHECK(p.E(t) >= 0.0);
}

TEST_CASE("seeded pulse integrates to exactly zero") {
  const Pulse p = make_seeded_ac_pulse(0.0, 1.0, 129, 42);
  CHECK(p.ac);
  CHECK(p.A_end() == 0.0);
  CHECK(std::isfinite(check_ac(p)));
  CHECK(check_ac(p) <= 1.0);
  // deterministic in the seed
  const Pulse q = make_seeded_ac_pulse(0.0, 1.0, 129, 42);
  for (double t : {0.13, 0.5, 0.77}) CHECK(p.E(t) == q.E(t));
  const Pulse r = make_seeded_ac_pulse(0.0, 1.0, 129, 43);
  bool differs = false;
  for (double t : {0.13, 0.5, 0.77}) differs = differs || r.E(t) != p.E(t);
  CHECK(differs);
}

TEST_CASE("tabulated pulse validation and exact piecewise integration") {
  CHECK_THROWS(make_tabulated_pulse({0.0, 1.0}, {1.0}));
  CHECK_THROWS(make_tabulated_pulse({0.0}, {1.0}));
  CHECK_THROWS(make_tabulated_pulse({0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}));
  CHECK_THROWS(make_tabulated_pulse({0.0, 1.0, 0.5}, {0.0, 1.0, 0.0}));
  CHECK_THROWS(make_bump_derivative_pulse(1.0, 1.0));

  // triangle E on [0,2]: A(t) quadratic, A(2) = 1
  const Pulse p = make_tabulated_pulse({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(!p.ac);
  CHECK(p.A(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.A(0.5) == doctest::Approx(0.125).epsilon(1e-15));  // int_0^1/2 t dt
  CHECK(p.A(2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.E(0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(p.max_abs_A() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("field-off time of a two-lobe pulse with dead tail") {
  // positive lobe on [0,1], negative lobe on [1.5,2.5], zero afterwards
  const Pulse p = make_tabulated_pulse({0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0},
                                       {0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0});
  CHECK(p.ac);
  CHECK(p.A_end() == 0.0);
  CHECK(p.A(1.25) == doctest::Approx(0.5).epsilon(1e-15));
  const double t1 = check_ac(p);
  CHECK(t1 == 2.5);  // first node from which the primitive stays at zero
  CHECK(p.A(2.6) == 0.0);
}

TEST_CASE("spatial profiles: support and squared integral") {
  const SpatialProfile ind{ProfileKind::indicator};
  CHECK(ind.psi1(0.0) == 1.0);
  CHECK(ind.psi1(1.0) == 1.0);
  CHECK(ind.psi1(-1.0) == 1.0);
  CHECK(ind.psi1(1.0000001) == 0.0);
  CHECK(ind.psi_sq_integral(1) == 2.0);
  CHECK(ind.psi_sq_integral(3) == 8.0);

  const SpatialProfile bump{ProfileKind::bump};
  CHECK(bump.psi1(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bump.psi1(0.5) == 0.0);
  CHECK(bump.psi1(-0.5) == 0.0);
  CHECK(bump.psi1(0.49) > 0.0);
  const double one_dim = bump.psi_sq_integral(1);
  CHECK(one_dim > 0.0);
  CHECK(one_dim < 1.0);
  CHECK(bump.psi_sq_integral(2) == doctest::Approx(one_dim * one_dim).epsilon(1e-14));

  const double x2[2] = {0.1, -0.2};
  CHECK(bump.value(2, x2) == doctest::Approx(bump.psi1(0.1) * bump.psi1(-0.2)).epsilon(1e-15));
}

TEST_CASE("vector potential constructor validates and records the field-off time") {
  const Pulse ac = make_bump_derivative_pulse(0.0, 1.0);
  CHECK_THROWS(make_vector_potential(ac, SpatialProfile{}, 0, {1, 0, 0}, 1.0, 0.1));
  CHECK_THROWS(make_vector_potential(ac, SpatialProfile{}, 1, {1, 0, 0}, 0.0, 0.1));

  const VectorPotential vac = make_vector_potential(ac, SpatialProfile{}, 1, {1, 0, 0}, 2.0, 0.1);
  CHECK(vac.t1 < 1.0);  // AC pulse switches off before the support ends

  const VectorPotential vdc =
      make_vector_potential(make_halfwave_pulse(0.0, 1.0), SpatialProfile{}, 1, {1, 0, 0}, 2.0, 0.1);
  CHECK(vdc.t1 == 1.0);  // non-AC: constant vector potential persists
  CHECK(vdc.active(5.0));
  CHECK(!vac.active(5.0));
  CHECK(vac.active(0.5));

  VectorPotential off = vac;
  off.eta = 0.0;
  CHECK(!off.active(0.5));
}

TEST_CASE("homogeneous region: bond field reduces to the pulse value") {
  const Pulse p = make_halfwave_pulse(0.0, 2.0);
  const VectorPotential vp =
      make_vector_potential(p, SpatialProfile{ProfileKind::indicator}, 1, {1, 0, 0}, 50.0, 0.3);
  const Site x{0, 0, 0}, y{1, 0, 0};
  const double t = 0.8;
  CHECK(integrated_bond_field(vp, t, x, y) == doctest::Approx(-0.3 * p.E(t)).epsilon(1e-14));
  // antisymmetric under orientation reversal
  CHECK(integrated_bond_field(vp, t, y, x) == doctest::Approx(0.3 * p.E(t)).epsilon(1e-14));
  CHECK(line_integral_A(vp, t, x, y) == doctest::Approx(0.3 * p.A(t)).epsilon(1e-14));
  // bonds must join nearest neighbours
  CHECK_THROWS(line_integral_A(vp, t, x, Site{2, 0, 0}));
  CHECK_THROWS(line_integral_A(vp, t, x, x));
  CHECK_THROWS(line_integral_A(vp, t, x, Site{1, 1, 0}));
}

TEST_CASE("line integral matches a dense quadrature on a smooth envelope") {
  const Pulse p = make_halfwave_pulse(0.0, 2.0);
  VectorPotential vp =
      make_vector_potential(p, SpatialProfile{ProfileKind::bump}, 2, {0.4, -0.9, 0}, 2.7, 0.7);
  vp.center = {0.3, -0.2, 0};
  const double t = 0.8;
  const Site from{0, -1, 0}, to{0, 0, 0};
  const auto integrand = [&](double a) {
    const double pos[2] = {from[0] + a * (to[0] - from[0]), from[1] + a * (to[1] - from[1])};
    const auto av = vp.A(t, pos);
    return av[0] * (to[0] - from[0]) + av[1] * (to[1] - from[1]);
  };
  const double oracle = simpson01(integrand, 1000);
  CHECK(line_integral_A(vp, t, from, to) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("indicator at integer scale weights interior bonds exactly 0 or 1") {
  const Pulse p = make_halfwave_pulse(0.0, 2.0);
  const VectorPotential vp =
      make_vector_potential(p, SpatialProfile{ProfileKind::indicator}, 1, {1, 0, 0}, 3.0, 0.5);
  const double t = 0.6, unit = 0.5 * p.A(t);
  // inside [-3,3]: quadrature weight is the unit weight sum (1 up to rounding)
  CHECK(line_integral_A(vp, t, Site{2, 0, 0}, Site{3, 0, 0}) ==
        doctest::Approx(unit).epsilon(1e-15));
  CHECK(line_integral_A(vp, t, Site{-3, 0, 0}, Site{-2, 0, 0}) ==
        doctest::Approx(unit).epsilon(1e-15));
  CHECK(line_integral_A(vp, t, Site{3, 0, 0}, Site{4, 0, 0}) == 0.0);    // outside: exact
  CHECK(line_integral_A(vp, t, Site{-4, 0, 0}, Site{-3, 0, 0}) == 0.0);
}

TEST_CASE("profile center shifts both the pointwise value and the bond quadrature") {
  const Pulse p = make_halfwave_pulse(0.0, 2.0);
  VectorPotential vp =
      make_vector_potential(p, SpatialProfile{ProfileKind::indicator}, 1, {1, 0, 0}, 1.0, 0.5);
  vp.center = {2.0, 0, 0};  // support [1, 3]
  const double t = 0.6;
  const double x_in[1] = {2.0}, x_out[1] = {0.0};
  CHECK(vp.profile_at(x_in) == 1.0);
  CHECK(vp.profile_at(x_out) == 0.0);
  // bond (1,2) sits inside the shifted support, bond (-1,0) outside
  CHECK(line_integral_A(vp, t, Site{1, 0, 0}, Site{2, 0, 0}) ==
        doctest::Approx(0.5 * p.A(t)).epsilon(1e-15));
  CHECK(line_integral_A(vp, t, Site{-1, 0, 0}, Site{0, 0, 0}) == 0.0);
}

TEST_CASE("peierls phase is unimodular and reverses by conjugation") {
  const Pulse p = make_halfwave_pulse(0.0, 2.0);
  const VectorPotential vp =
      make_vector_potential(p, SpatialProfile{ProfileKind::bump}, 2, {1, 0.5, 0}, 3.0, 0.9);
  const Site x{0, 0, 0}, y{0, 1, 0};
  const auto ph = peierls_phase(vp, 0.7, x, y);
  CHECK(std::abs(std::abs(ph) - 1.0) < 1e-15);
  const auto rev = peierls_phase(vp, 0.7, y, x);
  CHECK(std::abs(ph - std::conj(rev)) < 1e-15);
}
