#pragma once
#include <cstdint>
#include <vector>

#include "lft/correlations.hpp"
#include "lft/disorder.hpp"
#include "lft/geometry.hpp"
#include "lft/onebody.hpp"
#include "lft/reduce.hpp"

namespace lft {

// Space-averaged bond-current operators J_k = sum_{x in window} I_(x+e_k,x),
// rotated to the eigenbasis once so every spectral integral below reuses the
// same d matrices. Bonds have both endpoints in the window of half-side l, a
// set closed under every axis reflection, so window averages carry no parity
// artifact.
struct AveragedCurrents {
  int d = 0;
  int l = 0;
  long window_sites = 0;
  std::vector<Mat> ktilde;  // d matrices, V^dagger J_k V
};
AveragedCurrents averaged_currents(const EigenSystem& eig, int l);

// Time-integrated current commutator for a single ordered bond pair:
// integral over [0,t] of the equilibrium expectation of i[I_y, I_x(s)],
// evaluated term-by-term in the eigenbasis (x is the evolved bond).
double sigma_p(const EigenSystem& eig, double beta, const BondPair& x, const BondPair& y,
               double t);

// Ballistic coefficient of one bond: -2 Re <e_{x.a}, symbol e_{x.b}>.
double sigma_d(const Mat& symbol, const Box& box, const BondPair& x);

// Window-averaged kernels. xi_p is one d x d real matrix per grid time,
// xi_p[.](k,q) pairing the static direction k with the evolved direction q;
// xi_d is diagonal by construction.
std::vector<RMat> xi_p_l(const EigenSystem& eig, double beta, int l,
                         const std::vector<double>& tgrid, Exec ex = Exec::openmp);
std::vector<RMat> xi_p_from_currents(const EigenSystem& eig, double beta,
                                     const AveragedCurrents& currents,
                                     const std::vector<double>& tgrid, Exec ex = Exec::openmp);
RMat xi_d_l(const Mat& symbol, const Box& ambient, int l);
RMat xi_d_from_eigensystem(const EigenSystem& eig, double beta, int l);

// Kernel pair (paramagnetic time series + ballistic matrix) with ensemble
// statistics and full provenance.
struct TransportKernel {
  std::vector<double> tgrid;
  std::vector<RMat> xi_p;      // mean, one d x d matrix per grid time
  std::vector<RMat> xi_p_err;  // standard error, same shape (zero when n = 1)
  RMat xi_d;                   // d x d diagonal
  RMat xi_d_err;
  int d = 0;
  int l = 0;
  double beta = 0;
  double lambda = 0;
  long n = 1;  // realizations averaged
  std::uint64_t master_seed = 0;
  long realization_index = -1;  // >= 0 for single-realization kernels
};

// Both kernels of a single disorder realization, sharing one eigensystem.
TransportKernel realization_kernel(const EigenSystem& eig, double beta, int l,
                                   const std::vector<double>& tgrid, double lambda,
                                   std::uint64_t master_seed, long realization_index,
                                   Exec ex = Exec::openmp);

// Ensemble kernels per window size with Cauchy differences across
// consecutive window sizes and per-realization sup-norm deviations from the
// ensemble mean.
struct KernelCauchyRow {
  int l_from = 0;
  int l_to = 0;
  double dxi_p = 0;  // max over times and entries of |mean difference|
  double dxi_d = 0;
};
struct MacroTransport {
  std::vector<TransportKernel> kernels;            // one per window size
  std::vector<KernelCauchyRow> cauchy;             // consecutive pairs
  std::vector<std::vector<double>> deviations;     // per l, per realization
  // ensemble mean and stderr of the per-realization isotropy components:
  // for each axis pair k<q the lag-averaged xi_p entries (k,q), (q,k), the
  // diagonal gap (k,k)-(q,q), and the xi_d diagonal gap. Empty when d < 2.
  std::vector<std::vector<double>> iso_mean, iso_err;
};
MacroTransport macro_transport(const DisorderSpec& spec, int d, double beta,
                               const std::vector<int>& l_list, long N,
                               const std::vector<double>& tgrid, int margin = 2, double mu = 0,
                               Exec ex = Exec::openmp);

// Structural diagnostics of a kernel pair: residual of the t = 0 zero, of
// kq-symmetry, the largest eigenvalue across times (stays <= 0 for a
// negative semidefinite family), and the ballistic entry range.
struct KernelStructure {
  double zero_residual = 0;
  double symmetry_residual = 0;
  double negativity_max_eig = 0;
  double xi_d_min = 0;
  double xi_d_max = 0;
};
KernelStructure kernel_structure(const TransportKernel& kernel);

// Worst violation of |ensemble mean| <= 3 stderr over every isotropy
// component of the ensemble; <= 0 means scalar within Monte Carlo error.
// Zero when the ensemble carries no isotropy samples (d < 2).
double isotropy_margin(const MacroTransport& ensemble);

// Causal response kernel Sigma(t) = xi_d + xi_p(t) for t >= 0 (zero for
// t < 0), its scalar in-phase reduction, and the current viscosity
// xi_d^{-1} d/dt xi_p by central differences.
struct Conductivity {
  std::vector<double> tgrid;
  std::vector<RMat> sigma;
  double sigma_d_scalar = 0;
  std::vector<double> sigma_scalar;    // sigma_d_scalar + mean diagonal of xi_p
  bool viscosity_defined = false;      // false when |det xi_d| < 1e-12
  std::vector<RMat> viscosity;
};
Conductivity conductivity(const TransportKernel& kernel);

// Imaginary-time pairing coefficient Gamma_{k,q}(t) in closed spectral form
// and the residual of the identity xi_p(t) = Gamma(t) - Gamma(0) on the same
// averaging window.
struct GammaCheck {
  std::vector<double> tgrid;
  std::vector<double> gamma;
  double residual = 0;
};
GammaCheck gamma_check(const EigenSystem& eig, double beta, int l, int k, int q,
                       const std::vector<double>& tgrid, Exec ex = Exec::openmp);

// Time-integrated commutator of fluctuation observables (Wick form, built
// from occupied/empty factors) against the direct kernel on the same window;
// the two agree analytically, so the residual isolates floating-point error.
struct GreenKubo {
  std::vector<double> tgrid;
  std::vector<double> commutator_form;
  std::vector<double> kernel_form;
  double residual = 0;
};
GreenKubo green_kubo_check(const EigenSystem& eig, double beta, int l,
                           const std::vector<double>& tgrid, int k, int q,
                           Exec ex = Exec::openmp);

}  // namespace lft
