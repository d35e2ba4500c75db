#include <doctest.h>

#include <cmath>

#include "lft/energetics.hpp"

using namespace lft;

namespace {

DisorderSpec uniform_spec(double lambda, std::uint64_t seed) {
  DisorderSpec s;
  s.lambda = lambda;
  s.master_seed = seed;
  return s;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

struct DrivenRun {
  Box box;
  EvolutionRun run;
  Mat d0;
};

// small driven system: indicator window of half-side l_field inside a padded box
DrivenRun make_driven(double eta, int l_field, double t_end, double beta, std::uint64_t seed) {
  DrivenRun out;
  const DisorderSpec spec = uniform_spec(1.0, seed);
  const Pulse pulse = make_bump_derivative_pulse(0.0, std::min(1.0, t_end));
  const VectorPotential vp = make_vector_potential(
      pulse, SpatialProfile{ProfileKind::indicator}, 1, {1, 0, 0}, l_field, eta);
  out.box = build_box(1, padded_half_side(1, l_field, ProfileKind::indicator, t_end));
  const Realization rom = sample_realization(spec, out.box, 0);
  // dt divides the checkpoint spacing, so requested times land on the grid
  out.run = evolve(out.box, rom, spec, vp, 0.0, t_end, 0.025, linspace(0.0, t_end, 5));
  out.d0 = fermi_symbol(out.run.eig0, beta);
  return out;
}

}  // namespace

TEST_CASE("current densities: validation, equilibrium stillness, exact trace identity") {
  const DrivenRun dr = make_driven(0.0, 2, 0.5, 1.0, 7);
  const std::vector<double> tgrid = linspace(0.0, 0.5, 5);
  CHECK_THROWS(current_densities(dr.run, dr.d0, dr.box.l, tgrid));     // no margin
  CHECK_THROWS(current_densities(dr.run, Mat::Zero(2, 2), 2, tgrid));  // size mismatch

  // eta = 0: the state commutes with the generator, all currents vanish
  const CurrentReport still = current_densities(dr.run, dr.d0, 2, tgrid);
  CHECK(still.window_sites == 5);
  for (size_t i = 0; i < tgrid.size(); ++i) {
    CHECK(still.j_th[i][0] == 0.0);  // real symmetric symbol carries no flow
    CHECK(std::abs(still.j_p[i][0]) < 1e-13);
    CHECK(still.j_d[i][0] == 0.0);
  }
  CHECK(still.trace_check_residual < 1e-13);

  // driven: the two assembly routes agree to rounding on the same bond set
  const DrivenRun drv = make_driven(0.4, 2, 0.5, 1.0, 7);
  const CurrentReport rep = current_densities(drv.run, drv.d0, 2, tgrid);
  CHECK(rep.trace_check_residual < 1e-13);
  // equilibrium row is constant by construction
  for (size_t i = 1; i < tgrid.size(); ++i) CHECK(rep.j_th[i][0] == rep.j_th[0][0]);
  // mid-pulse the full current moves
  double peak = 0;
  for (size_t i = 0; i < tgrid.size(); ++i)
    peak = std::max(peak, std::abs(rep.j_p[i][0] + rep.j_d[i][0]));
  CHECK(peak > 1e-4);
}

TEST_CASE("linear response: grid validation and assembly from the kernel") {
  TransportKernel ker;
  ker.d = 1;
  ker.tgrid = linspace(0.0, 1.0, 11);
  for (double t : ker.tgrid) {
    ker.xi_p.push_back(RMat::Constant(1, 1, -0.2 * t * t));  // smooth, zero at t=0
    ker.xi_p_err.push_back(RMat::Zero(1, 1));
  }
  ker.xi_d = RMat::Constant(1, 1, 1.7);
  ker.xi_d_err = RMat::Zero(1, 1);
  const Pulse pulse = make_tabulated_pulse({0.0, 0.5, 1.0}, {0.0, 1.0, 0.0});
  const std::array<double, 3> w{1, 0, 0};

  CHECK_THROWS(linear_response_current(ker, pulse, w, {0.0, 0.1, 0.3}));  // non-uniform
  CHECK_THROWS(linear_response_current(ker, pulse, w, linspace(0.0, 1.0, 21)));  // step mismatch
  {
    TransportKernel shifted = ker;
    for (double& t : shifted.tgrid) t += 0.1;
    CHECK_THROWS(linear_response_current(shifted, pulse, w, linspace(0.1, 1.1, 11)));
  }

  const std::vector<double> tgrid = linspace(0.0, 1.0, 11);
  const LinearResponse lr = linear_response_current(ker, pulse, w, tgrid);
  REQUIRE(lr.total.size() == tgrid.size());
  CHECK(lr.paramagnetic[0][0] == 0.0);
  for (size_t i = 0; i < tgrid.size(); ++i) {
    // ballistic part uses the exact drive primitive
    CHECK(lr.diamagnetic[i][0] ==
          doctest::Approx(1.7 * -pulse.A(tgrid[i])).epsilon(1e-14));
    CHECK(lr.total[i][0] ==
          doctest::Approx(lr.paramagnetic[i][0] + lr.diamagnetic[i][0]).epsilon(1e-14));
    // independent trapezoid of the convolution integrand
    double conv = 0;
    const double h = 0.1;
    if (i > 0) {
      for (size_t j = 0; j <= i; ++j) {
        const double wt = (j == 0 || j == i) ? 0.5 : 1.0;
        conv += wt * ker.xi_p[i - j](0, 0) * -pulse.E(tgrid[j]);
      }
      conv *= h;
    }
    CHECK(lr.paramagnetic[i][0] == doctest::Approx(conv).epsilon(1e-13));
  }
}

TEST_CASE("energy increments: trace-box validation and the exact balance") {
  const DrivenRun drv = make_driven(0.3, 2, 0.5, 1.0, 11);
  const std::vector<double> tgrid = linspace(0.0, 0.5, 5);
  CHECK_THROWS(energy_increments(drv.run, drv.d0, tgrid, 0));
  CHECK_THROWS(energy_increments(drv.run, drv.d0, tgrid, drv.box.l + 1));
  // a trace box below the propagation buffer is rejected
  CHECK_THROWS(energy_increments(drv.run, drv.d0, tgrid, 2));

  const EnergyLedger led = energy_increments(drv.run, drv.d0, tgrid, drv.box.l);
  CHECK(led.balance_residual < 1e-13);
  CHECK(led.min_S >= -1e-10);
  CHECK(led.S[0] == 0.0);
  CHECK(led.P[0] == 0.0);
  // energy genuinely moved mid-pulse
  double peak = 0;
  for (double v : led.Ip) peak = std::max(peak, std::abs(v));
  CHECK(peak > 1e-8);

  // the undriven ledger is identically zero
  const DrivenRun still = make_driven(0.0, 2, 0.5, 1.0, 11);
  const EnergyLedger zero = energy_increments(still.run, still.d0, tgrid, still.box.l);
  for (size_t i = 0; i < tgrid.size(); ++i) {
    CHECK(std::abs(zero.S[i]) < 1e-12);
    CHECK(zero.P[i] == 0.0);
    CHECK(zero.Id[i] == 0.0);
  }
}

TEST_CASE("density normalization divides by eta^2 and the field-site count") {
  EnergyLedger led;
  led.tgrid = {0.0, 1.0};
  led.S = {2.0, 4.0};
  led.P = {1.0, 3.0};
  led.Ip = {2.5, 6.5};
  led.Id = {0.5, 0.5};
  CHECK_THROWS(fill_densities(led, 0.0, 5));
  CHECK_THROWS(fill_densities(led, 0.1, 0));
  fill_densities(led, 0.5, 8);
  const double norm = 0.25 * 8;
  for (size_t i = 0; i < 2; ++i) {
    CHECK(led.s[i] == led.S[i] / norm);
    CHECK(led.p[i] == led.P[i] / norm);
    CHECK(led.ip[i] == led.Ip[i] / norm);
    CHECK(led.id[i] == led.Id[i] / norm);
  }
}

TEST_CASE("energy sweep: list validation, cell layout, determinism") {
  const DisorderSpec spec = uniform_spec(1.0, 31);
  const Pulse pulse = make_bump_derivative_pulse(0.0, 0.75);
  const std::vector<double> tgrid = linspace(0.0, 0.75, 4);
  const std::array<double, 3> w{1, 0, 0};

  CHECK_THROWS(energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w, {}, {2}, 1.0, 0.025,
                                tgrid));
  CHECK_THROWS(energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w, {0.05, 0.1}, {2},
                                1.0, 0.025, tgrid));  // etas must decrease
  CHECK_THROWS(energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w, {0.1, 0.0}, {2},
                                1.0, 0.025, tgrid));  // eta = 0
  CHECK_THROWS(energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w, {0.1}, {3, 2}, 1.0,
                                0.025, tgrid));  // ls must increase
  CHECK_THROWS(energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w, {0.1}, {2}, 1.0,
                                0.025, {0.0, 0.1, 0.3}));  // non-uniform grid
  CHECK_THROWS(energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w, {0.1}, {2}, 1.0,
                                0.025, linspace(-0.5, 0.5, 5)));  // starts before the pulse

  const EnergySweep sweep = energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w,
                                             {0.1, 0.05}, {2, 3}, 1.0, 0.025, tgrid, 0.0, true);
  REQUIRE(sweep.cells.size() == 4);
  // cells run eta-fastest, field box slowest
  CHECK(sweep.cells[0].eta == 0.1);
  CHECK(sweep.cells[0].l_field == 2);
  CHECK(sweep.cells[1].eta == 0.05);
  CHECK(sweep.cells[1].l_field == 2);
  CHECK(sweep.cells[2].l_field == 3);
  CHECK(sweep.cells[0].field_sites == 5);
  CHECK(sweep.cells[2].field_sites == 7);
  REQUIRE(sweep.eta_pair_diffs.size() == 1);
  CHECK(sweep.eta_pair_diffs[0] > 0.0);
  REQUIRE(sweep.l_pair_diffs.size() == 1);
  CHECK(sweep.l_pair_diffs[0] > 0.0);
  for (const EnergyCell& cell : sweep.cells) {
    CHECK(cell.ledger.balance_residual < 1e-12);
    REQUIRE(cell.linear_work.size() == tgrid.size());
    for (double v : cell.linear_work) CHECK(v >= 0.0);
    // densities are filled and finite
    for (double v : cell.ledger.s) CHECK(std::isfinite(v));
  }

  const EnergySweep again = energy_densities(spec, 0, 1, pulse, ProfileKind::indicator, w,
                                             {0.1, 0.05}, {2, 3}, 1.0, 0.025, tgrid, 0.0, true,
                                             Exec::serial);
  for (size_t c = 0; c < sweep.cells.size(); ++c)
    for (size_t i = 0; i < tgrid.size(); ++i) {
      CHECK(sweep.cells[c].ledger.S[i] == again.cells[c].ledger.S[i]);
      CHECK(sweep.cells[c].ledger.P[i] == again.cells[c].ledger.P[i]);
    }
}

TEST_CASE("heat predictions: internal identities and an independent reassembly") {
  // disorder-free kernel on a coarse grid
  const Box amb = build_box(1, 4);
  const DisorderSpec spec = uniform_spec(0.0, 1);
  const Realization rom = sample_realization(spec, amb, 0);
  const EigenSystem eig = diagonalize(hamiltonian(amb, rom, spec, nullptr, 0.0), amb);
  const std::vector<double> tgrid = linspace(0.0, 1.0, 11);
  const TransportKernel ker = realization_kernel(eig, 1.0, 2, tgrid, 0.0, 1, 0);

  const Pulse pulse = make_bump_derivative_pulse(0.0, 0.5);
  const VectorPotential vp = make_vector_potential(
      pulse, SpatialProfile{ProfileKind::indicator}, 1, {1, 0, 0}, 3.0, 0.1);

  CHECK_THROWS(joule_predictions(ker, vp, tgrid, 0));
  CHECK_THROWS(joule_predictions(ker, vp, {0.0, 0.1, 0.3}, 7));

  const JoulePrediction jp = joule_predictions(ker, vp, tgrid, 7);
  CHECK(jp.spatial_factor == doctest::Approx(2.0 * 3.0).epsilon(1e-15));  // indicator: 2 * scale
  for (size_t i = 0; i < tgrid.size(); ++i) {
    CHECK(jp.e_lin[i] == doctest::Approx(jp.ip[i] + jp.id[i]).epsilon(1e-14));
    CHECK(std::abs(jp.s[i] + jp.p[i] - jp.ip[i] - jp.id[i]) < 1e-14);
    // one direction, unit w: the scalar-kernel heat is ip - id
    CHECK(jp.q[i] == doctest::Approx(jp.ip[i] - jp.id[i]).epsilon(1e-12));
  }
  // after the pulse has integrated away, the ballistic and cross terms vanish
  CHECK(jp.id.back() == 0.0);
  CHECK(jp.s.back() == doctest::Approx(jp.ip.back()).epsilon(1e-14));
  CHECK(jp.p.back() == 0.0);
  // heat accumulates monotonically once the drive is over
  CHECK(jp.ip.back() >= 0.0);

  // independent reassembly of the nested work integral
  const double h = 0.1;
  const double factor = jp.spatial_factor / 7.0;
  std::vector<double> drive(tgrid.size());
  for (size_t i = 0; i < tgrid.size(); ++i) drive[i] = -pulse.E(tgrid[i]);
  std::vector<double> wsum(tgrid.size(), 0.0);
  for (size_t i = 1; i < tgrid.size(); ++i) {
    double acc = 0;
    for (size_t j = 0; j <= i; ++j)
      acc += ((j == 0 || j == i) ? 0.5 : 1.0) * ker.xi_p[i - j](0, 0) * drive[j];
    wsum[i] = acc * h;
  }
  double cum = 0;
  for (size_t i = 1; i < tgrid.size(); ++i) {
    cum += 0.5 * h * (drive[i - 1] * wsum[i - 1] + drive[i] * wsum[i]);
    CHECK(jp.ip[i] == doctest::Approx(factor * cum).epsilon(1e-13));
  }
}
