#include <doctest.h>

#include <cmath>

#include "fock_oracle.hpp"
#include "lft/transport.hpp"

using namespace lft;

namespace {

DisorderSpec uniform_spec(double lambda, std::uint64_t seed) {
  DisorderSpec s;
  s.lambda = lambda;
  s.master_seed = seed;
  return s;
}

struct System {
  Box box;
  Mat h;
  EigenSystem eig;
};

System disordered_system(int d, int l, double lambda, std::uint64_t seed) {
  System s;
  s.box = build_box(d, l);
  const DisorderSpec spec = uniform_spec(lambda, seed);
  const Realization rom = sample_realization(spec, s.box, 0);
  s.h = hamiltonian(s.box, rom, spec, nullptr, 0.0);
  s.eig = diagonalize(s.h, s.box);
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

double clean_eps(int k, int n) { return 2.0 - 2.0 * std::cos(k * M_PI / (n + 1)); }
double clean_mode(int k, int j, int n) { return std::sqrt(2.0 / (n + 1)) * std::sin(k * M_PI * j / (n + 1)); }

}  // namespace

TEST_CASE("time-integrated commutator matches a many-body simpson quadrature") {
  const System sys = disordered_system(1, 1, 1.2, 91);
  const BondPair x{Site{-1, 0, 0}, Site{0, 0, 0}};
  const BondPair y{Site{0, 0, 0}, Site{1, 0, 0}};

  const fock::FockSpace f(static_cast<int>(sys.box.n));
  const Mat ix = f.current(bond_current(x.a, x.b), sys.box);
  const Mat iy = f.current(bond_current(y.a, y.b), sys.box);

  for (double beta : {0.5, 2.0}) {
    const fock::GibbsState g(f, sys.h, beta);
    for (double t : {0.45, 0.9}) {
      // integral over [0,t] of rho(i [I_y, I_x(s)]) by composite simpson
      const int panels = 400;
      double acc = 0;
      for (int j = 0; j <= 2 * panels; ++j) {
        const double s = t * j / (2.0 * panels);
        const Mat ixs = g.evolved(ix, s);
        const double val = (cx(0, 1) * g.expect(iy * ixs - ixs * iy)).real();
        acc += ((j == 0 || j == 2 * panels) ? 1.0 : (j % 2 ? 4.0 : 2.0)) * val;
      }
      acc *= t / (6.0 * panels);
      CHECK(sigma_p(sys.eig, beta, x, y, t) == doctest::Approx(acc).epsilon(1e-8));
    }
    CHECK(sigma_p(sys.eig, beta, x, y, 0.0) == 0.0);
  }
  CHECK_THROWS(sigma_p(sys.eig, 1.0, BondPair{Site{-2, 0, 0}, Site{-1, 0, 0}}, y, 1.0));
}

TEST_CASE("ballistic coefficient of the clean chain from closed-form modes") {
  const System sys = disordered_system(1, 3, 0.0, 1);
  const int n = static_cast<int>(sys.box.n);
  const double beta = 1.5;
  const Mat symbol = fermi_symbol(sys.eig, beta);

  for (int a = -3; a < 3; ++a) {
    const BondPair bp{Site{a, 0, 0}, Site{a + 1, 0, 0}};
    double want = 0;
    for (int k = 1; k <= n; ++k)
      want += -2.0 * clean_mode(k, a + 4, n) * clean_mode(k, a + 5, n) /
              (1.0 + std::exp(beta * clean_eps(k, n)));
    CHECK(sigma_d(symbol, sys.box, bp) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS(sigma_d(symbol, sys.box, BondPair{Site{3, 0, 0}, Site{4, 0, 0}}));
  CHECK_THROWS(sigma_d(Mat::Zero(2, 2), sys.box, BondPair{Site{0, 0, 0}, Site{1, 0, 0}}));
}

TEST_CASE("averaged currents: validation and kernel reconstruction") {
  const System sys = disordered_system(2, 2, 0.9, 14);
  CHECK_THROWS(averaged_currents(sys.eig, -1));
  CHECK_THROWS(averaged_currents(sys.eig, 2));  // needs a unit margin

  const AveragedCurrents ac = averaged_currents(sys.eig, 1);
  CHECK(ac.d == 2);
  CHECK(ac.window_sites == 9);
  REQUIRE(ac.ktilde.size() == 2);
  const Box win = build_box(2, 1);
  for (int k = 0; k < 2; ++k) {
    Mat jk = Mat::Zero(sys.box.n, sys.box.n);
    for (const Bond& b : nearest_bonds(win, win))
      if (b.k == k) jk += current_kernel(sys.box, bond_current(b.head, b.tail), Site{0, 0, 0});
    const Mat back = sys.eig.V * ac.ktilde[static_cast<size_t>(k)] * sys.eig.V.adjoint();
    CHECK((back - jk).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("current kernel: zero start, symmetry, negative semidefiniteness") {
  const System sys = disordered_system(2, 2, 1.0, 47);
  const std::vector<double> tgrid = linspace(0.0, 1.5, 7);
  const std::vector<RMat> xp = xi_p_l(sys.eig, 1.0, 1, tgrid);
  REQUIRE(xp.size() == tgrid.size());
  CHECK(xp[0].cwiseAbs().maxCoeff() == 0.0);  // t = 0 exactly
  for (const RMat& m : xp) {
    CHECK((m - RMat(m.transpose())).cwiseAbs().maxCoeff() < 1e-13);
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (m + m.transpose()));
    CHECK(es.eigenvalues().maxCoeff() <= 1e-10);
  }
  // diagonal entries never exceed zero: xi(t) compares pairings at t and 0
  for (const RMat& m : xp)
    for (int k = 0; k < 2; ++k) CHECK(m(k, k) <= 1e-12);
}

TEST_CASE("window kernels are bitwise identical across execution policies") {
  const System sys = disordered_system(2, 2, 1.0, 58);
  const std::vector<double> tgrid = linspace(0.0, 2.0, 9);
  const std::vector<RMat> a = xi_p_l(sys.eig, 0.7, 1, tgrid, Exec::serial);
  const std::vector<RMat> b = xi_p_l(sys.eig, 0.7, 1, tgrid, Exec::openmp);
  for (size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ballistic matrix: diagonal, isotropic when clean, small at high temperature") {
  const System sys = disordered_system(2, 3, 0.0, 1);
  const RMat xd = xi_d_from_eigensystem(sys.eig, 1.0, 1);
  CHECK(xd(0, 1) == 0.0);
  CHECK(xd(1, 0) == 0.0);
  CHECK(xd(0, 0) == doctest::Approx(xd(1, 1)).epsilon(1e-12));

  // independent mode sum for the (0,0) entry over the interior bond set
  const int n = sys.box.side;
  double want = 0;
  const Box win = build_box(2, 1);
  for (const Bond& b : nearest_bonds(win, win)) {
    if (b.k != 0) continue;
    double c = 0;
    for (int k1 = 1; k1 <= n; ++k1)
      for (int k2 = 1; k2 <= n; ++k2) {
        const double e = clean_eps(k1, n) + clean_eps(k2, n);
        c += clean_mode(k1, b.head[0] + 4, n) * clean_mode(k2, b.head[1] + 4, n) *
             clean_mode(k1, b.tail[0] + 4, n) * clean_mode(k2, b.tail[1] + 4, n) /
             (1.0 + std::exp(e));
      }
    want += -2.0 * c;
  }
  want /= static_cast<double>(win.n);
  CHECK(xd(0, 0) == doctest::Approx(want).epsilon(1e-12));

  // free fermions at high temperature carry a small ballistic coefficient
  const RMat hot = xi_d_from_eigensystem(sys.eig, 1e-3, 1);
  CHECK(hot.cwiseAbs().maxCoeff() <= 1e-3);

  CHECK_THROWS(xi_d_l(fermi_symbol(sys.eig, 1.0), sys.box, 3));
  CHECK_THROWS(xi_d_l(Mat::Zero(3, 3), sys.box, 1));
}

TEST_CASE("single-realization kernel carries provenance and zero error bars") {
  const System sys = disordered_system(1, 3, 1.0, 77);
  const std::vector<double> tgrid = linspace(0.0, 1.0, 5);
  const TransportKernel ker = realization_kernel(sys.eig, 1.3, 2, tgrid, 1.0, 77, 4);
  CHECK(ker.d == 1);
  CHECK(ker.l == 2);
  CHECK(ker.beta == 1.3);
  CHECK(ker.lambda == 1.0);
  CHECK(ker.n == 1);
  CHECK(ker.master_seed == 77);
  CHECK(ker.realization_index == 4);
  const std::vector<RMat> xp = xi_p_l(sys.eig, 1.3, 2, tgrid);
  for (size_t i = 0; i < xp.size(); ++i) {
    CHECK((ker.xi_p[i] - xp[i]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ker.xi_p_err[i].cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK((ker.xi_d - xi_d_from_eigensystem(sys.eig, 1.3, 2)).cwiseAbs().maxCoeff() == 0.0);

  const KernelStructure ks = kernel_structure(ker);
  CHECK(ks.zero_residual == 0.0);
  CHECK(ks.symmetry_residual < 1e-13);
  CHECK(ks.negativity_max_eig <= 1e-12);
  CHECK(ks.xi_d_min <= ks.xi_d_max);
  CHECK(ks.xi_d_max == ker.xi_d.maxCoeff());
}

TEST_CASE("ensemble kernels: averaging, spread, and degenerate determinism") {
  const std::vector<double> tgrid = linspace(0.0, 1.0, 5);

  DisorderSpec spec = uniform_spec(1.0, 123);
  CHECK_THROWS(macro_transport(spec, 1, 1.0, {2}, 1, tgrid));      // N < 2
  CHECK_THROWS(macro_transport(spec, 1, 1.0, {}, 4, tgrid));       // empty l list
  CHECK_THROWS(macro_transport(spec, 1, 1.0, {2}, 4, tgrid, 0));   // margin < 1

  const MacroTransport mt = macro_transport(spec, 1, 1.0, {2, 3}, 2, tgrid, 2);
  REQUIRE(mt.kernels.size() == 2);
  REQUIRE(mt.cauchy.size() == 1);
  CHECK(mt.cauchy[0].l_from == 2);
  CHECK(mt.cauchy[0].l_to == 3);
  CHECK(mt.cauchy[0].dxi_p > 0.0);
  CHECK(mt.kernels[0].n == 2);

  // N = 2 mean is the exact midpoint of the two per-realization kernels
  {
    const Box amb = build_box(1, 4);
    std::vector<std::vector<RMat>> xps;
    for (long i = 0; i < 2; ++i) {
      const Realization rom = sample_realization(spec, amb, i);
      const EigenSystem eig = diagonalize(hamiltonian(amb, rom, spec, nullptr, 0.0), amb);
      xps.push_back(xi_p_l(eig, 1.0, 2, tgrid));
    }
    for (size_t ti = 0; ti < tgrid.size(); ++ti) {
      const RMat mid = 0.5 * (xps[0][ti] + xps[1][ti]);
      CHECK((mt.kernels[0].xi_p[ti] - mid).cwiseAbs().maxCoeff() < 1e-15);
    }
  }

  // a constant-quantile table makes every realization identical
  DisorderSpec degen;
  degen.kind = DisorderKind::tabulated;
  degen.lambda = 1.0;
  degen.quantiles = {0.25, 0.25};
  // N = 4: power-of-two pairwise sums keep identical samples exactly equal
  const MacroTransport dm = macro_transport(degen, 1, 1.0, {2}, 4, tgrid, 2);
  for (size_t ti = 0; ti < tgrid.size(); ++ti)
    CHECK(dm.kernels[0].xi_p_err[ti].cwiseAbs().maxCoeff() == 0.0);
  CHECK(dm.kernels[0].xi_d_err.cwiseAbs().maxCoeff() == 0.0);
  for (double dev : dm.deviations[0]) CHECK(dev == 0.0);
  CHECK(isotropy_margin(dm) == 0.0);  // no axis pairs in one dimension

  // clean two-dimensional ensemble: every isotropy component collapses to zero
  DisorderSpec clean = uniform_spec(0.0, 5);
  const MacroTransport cm = macro_transport(clean, 2, 1.0, {1}, 2, tgrid, 2);
  REQUIRE(cm.iso_mean.size() == 1);
  CHECK(cm.iso_mean[0].size() == 4);
  CHECK(isotropy_margin(cm) <= 0.0);
}

TEST_CASE("imaginary-time pairing identity holds pointwise") {
  const System s1 = disordered_system(1, 3, 1.0, 201);
  const std::vector<double> tgrid = linspace(0.0, 1.5, 7);
  CHECK_THROWS(gamma_check(s1.eig, 0.0, 1, 0, 0, tgrid));
  CHECK_THROWS(gamma_check(s1.eig, 1.0, 1, 0, 1, tgrid));  // direction out of range

  const GammaCheck gc = gamma_check(s1.eig, 1.0, 1, 0, 0, tgrid);
  CHECK(gc.residual <= 1e-10);
  // the diagonal pairing is a positive cosine sum, maximal at t = 0
  for (size_t i = 1; i < gc.gamma.size(); ++i) CHECK(gc.gamma[i] <= gc.gamma[0] + 1e-12);
  CHECK(gc.gamma[0] >= 0.0);

  const System s2 = disordered_system(2, 2, 0.8, 202);
  CHECK(gamma_check(s2.eig, 1.0, 1, 0, 1, tgrid).residual <= 1e-10);
  CHECK(gamma_check(s2.eig, 2.0, 1, 1, 1, tgrid).residual <= 1e-10);

  // policy-independent to the bit
  const GammaCheck gs = gamma_check(s1.eig, 1.0, 1, 0, 0, tgrid, Exec::serial);
  for (size_t i = 0; i < gs.gamma.size(); ++i) CHECK(gs.gamma[i] == gc.gamma[i]);
}

TEST_CASE("occupied-empty commutator form reproduces the kernel") {
  const System s1 = disordered_system(1, 3, 1.0, 301);
  const std::vector<double> tgrid = linspace(0.0, 2.0, 9);
  const GreenKubo gk = green_kubo_check(s1.eig, 1.0, 1, tgrid, 0, 0);
  CHECK(gk.residual <= 1e-10);
  CHECK(gk.commutator_form[0] == 0.0);
  CHECK(gk.kernel_form[0] == 0.0);

  const System s2 = disordered_system(2, 2, 0.7, 302);
  CHECK(green_kubo_check(s2.eig, 0.5, 1, tgrid, 0, 1).residual <= 1e-10);
  CHECK_THROWS(green_kubo_check(s1.eig, -1.0, 1, tgrid, 0, 0));
  CHECK_THROWS(green_kubo_check(s1.eig, 1.0, 1, tgrid, 1, 0));
}

TEST_CASE("conductivity assembles the causal kernel and the current viscosity") {
  // hand-built kernel: xi_p(t) = slope * t on the diagonal, xi_d = 2
  TransportKernel ker;
  ker.d = 1;
  ker.l = 2;
  ker.tgrid = linspace(0.0, 1.0, 5);
  const double slope = 0.3;
  for (double t : ker.tgrid) {
    ker.xi_p.push_back(RMat::Constant(1, 1, slope * t));
    ker.xi_p_err.push_back(RMat::Zero(1, 1));
  }
  ker.xi_d = RMat::Constant(1, 1, 2.0);
  ker.xi_d_err = RMat::Zero(1, 1);

  const Conductivity con = conductivity(ker);
  CHECK(con.sigma_d_scalar == 2.0);
  REQUIRE(con.sigma.size() == 5);
  for (size_t i = 0; i < con.sigma.size(); ++i) {
    CHECK(con.sigma[i](0, 0) == doctest::Approx(2.0 + slope * ker.tgrid[i]).epsilon(1e-15));
    CHECK(con.sigma_scalar[i] == doctest::Approx(2.0 + slope * ker.tgrid[i]).epsilon(1e-15));
  }
  REQUIRE(con.viscosity_defined);
  CHECK(con.viscosity[0](0, 0) == 0.0);  // even extension at t = 0
  for (size_t i = 1; i < con.viscosity.size(); ++i)
    CHECK(con.viscosity[i](0, 0) == doctest::Approx(slope / 2.0).epsilon(1e-13));

  // a singular ballistic matrix disables the viscosity
  ker.xi_d = RMat::Zero(1, 1);
  const Conductivity sing = conductivity(ker);
  CHECK(!sing.viscosity_defined);
  CHECK(sing.viscosity.empty());

  // negative grid times are clamped to zero response
  TransportKernel causal;
  causal.d = 1;
  causal.tgrid = {-0.5, 0.0, 0.5, 1.0, 1.5};
  causal.xi_p.assign(5, RMat::Zero(1, 1));
  causal.xi_p_err.assign(5, RMat::Zero(1, 1));
  causal.xi_d = RMat::Constant(1, 1, 1.0);
  causal.xi_d_err = RMat::Zero(1, 1);
  const Conductivity cc = conductivity(causal);
  CHECK(cc.sigma[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(cc.sigma_scalar[0] == 0.0);
  CHECK(cc.sigma[1](0, 0) == 1.0);
}
