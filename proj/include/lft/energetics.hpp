#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "lft/dynamics.hpp"
#include "lft/transport.hpp"

namespace lft {

// Window-averaged bond currents from the evolved symbol. j_th is the
// equilibrium current (time-independent, repeated per row), j_p the change
// of the plain bond current, j_d the expectation of the field-corrected
// observable. trace_check_residual compares the summed densities against a
// velocity-operator trace assembled independently from conjugated phases on
// the same bond set; the two agree identically, so the residual isolates
// rounding error.
struct CurrentReport {
  std::vector<double> tgrid;
  std::vector<std::array<double, 3>> j_th, j_p, j_d;
  double trace_check_residual = 0;
  int l = 0;
  long window_sites = 0;
};
CurrentReport current_densities(const EvolutionRun& run, const Mat& d0, int l,
                                const std::vector<double>& tgrid);

// First-order current prediction per unit field strength on a uniform grid:
// paramagnetic part by trapezoid convolution of xi_p with the drive, ballistic
// part xi_d w times the exact drive primitive. The drive is the negative of
// the pulse amplitude, matching the sign of the measured response.
struct LinearResponse {
  std::vector<double> tgrid;
  std::vector<std::array<double, 3>> total, paramagnetic, diamagnetic;
};
LinearResponse linear_response_current(const TransportKernel& kernel, const Pulse& pulse,
                                       const std::array<double, 3>& w,
                                       const std::vector<double>& tgrid);

// The four energy increments on the trace box of half-side L_trace:
//   S  = tr[(d_t - d0) H0_L]      internal-energy increment
//   P  = tr[d_t W_t]              potential-energy increment
//   Ip = tr[(d_t - d0)(H0_L+W_t)] paramagnetic increment
//   Id = tr[d0 W_t]               ballistic increment
// with W_t the field-dressed hopping correction restricted to the trace box.
// S + P = Ip + Id up to rounding; densities are filled by fill_densities.
struct EnergyLedger {
  std::vector<double> tgrid;
  std::vector<double> S, P, Ip, Id;  // energy units
  std::vector<double> s, p, ip, id;  // after (eta^2, field sites) normalization
  double balance_residual = 0;       // max_t |S + P - Ip - Id|
  double min_S = 0;
  int L_trace = 0;
};
EnergyLedger energy_increments(const EvolutionRun& run, const Mat& d0,
                               const std::vector<double>& tgrid, int L_trace);
void fill_densities(EnergyLedger& ledger, double eta, long field_sites);

// Sweep of normalized ledgers over field strengths (decreasing) and field
// box sizes (increasing), with difference diagnostics for the joint
// small-field / large-box limit and an optional +-eta antisymmetrization
// isolating the field-linear work term.
struct EnergyCell {
  double eta = 0;
  int l_field = 0;
  long field_sites = 0;
  EnergyLedger ledger;
  std::vector<double> linear_work;  // max over S,P,Ip,Id of the eta-odd part, per time
};
struct EnergySweep {
  std::vector<double> tgrid;
  std::vector<EnergyCell> cells;
  std::vector<double> eta_pair_diffs;  // at largest l, per consecutive eta pair
  double eta_diff_slope = 0;           // log-log slope of the diffs against eta
  std::vector<double> l_pair_diffs;    // at smallest eta, per consecutive l pair
};
EnergySweep energy_densities(const DisorderSpec& spec, long realization_index, int d,
                             const Pulse& pulse, ProfileKind profile_kind,
                             const std::array<double, 3>& w,
                             const std::vector<double>& eta_list, const std::vector<int>& l_list,
                             double beta, double dt, const std::vector<double>& tgrid,
                             double mu = 0, bool antisymmetrize = false,
                             Exec ex = Exec::openmp);

// Kernel-based predictions for the normalized densities (per unit eta^2,
// divided by site_normalization like the measured ledgers):
//   ip: nested work integral of the paramagnetic response
//   id: -(1/2) (drive primitive)^2 <w, xi_d w>
//   s = ip - cross, p = id + cross, with the cross term the drive primitive
//       times the paramagnetic convolution at the evaluation time
//   e_lin = ip + id; q uses the direction-averaged scalar kernel.
// The spatial profile enters through the continuum integral of psi^2.
struct JoulePrediction {
  std::vector<double> tgrid;
  std::vector<double> ip, id, s, p, e_lin, q;
  double spatial_factor = 0;  // integral of psi(x/scale)^2 d^dx
};
JoulePrediction joule_predictions(const TransportKernel& kernel, const VectorPotential& vp,
                                  const std::vector<double>& tgrid, long site_normalization);

}  // namespace lft
