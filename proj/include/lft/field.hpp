#pragma once
#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "lft/geometry.hpp"

namespace lft {

// Temporal pulse E_t with support [t0, tend] and its exact primitive
// A_t = int_{t0}^t E_s ds. The tabulated kind interpolates E piecewise
// linearly; the primitive is the exact integral of that interpolant.
enum class PulseKind { bump_derivative, tabulated };

struct Pulse {
  PulseKind kind = PulseKind::bump_derivative;
  double t0 = 0;
  double tend = 1;
  bool ac = false;  // |A(tend)| <= 1e-12

  // tabulated nodes (empty for bump_derivative)
  std::vector<double> ts, vals, prim;

  double E(double t) const;
  double A(double t) const;        // primitive; constant A(tend) after the support
  double A_end() const { return A(tend); }
  double max_abs_A() const;        // sup_t |A_t|
};

Pulse make_bump_derivative_pulse(double t0, double tend);
Pulse make_tabulated_pulse(std::vector<double> ts, std::vector<double> vals);
// One nonnegative sin^2 lobe (non-AC), tabulated.
Pulse make_halfwave_pulse(double t0, double tend, int nodes = 257);
// Random tabulated pulse with exactly zero total integral (AC).
Pulse make_seeded_ac_pulse(double t0, double tend, int nodes, std::uint64_t seed);

// Smallest t >= t0 with |A_{t'}| <= tol_ac for all t' >= t, where
// tol_ac = 1e-10 * max|A|; +inf sentinel when the primitive never settles
// at zero. Resolved on the pulse's node grid (4097 nodes for smooth kinds).
inline constexpr double never_ac = std::numeric_limits<double>::infinity();
double check_ac(const Pulse& pulse);

// Spatial envelope psi: product of identical 1D factors. The bump is
// supported on [-1/2,1/2]^d, the indicator on [-1,1]^d.
enum class ProfileKind { indicator, bump };

struct SpatialProfile {
  ProfileKind kind = ProfileKind::indicator;
  double psi1(double u) const;                  // one coordinate factor
  double value(int d, const double* x) const;   // prod_k psi1(x_k)
  double psi_sq_integral(int d) const;          // continuum int psi^2 d^dx at unit scale
};

// Separable Weyl-gauge field A(t,x) = eta * w * psi((x - center)/scale) * A_t.
// The default center 0 gives the plain scaled profile; a half-unit offset
// lets an indicator support end exactly on a bond midpoint so that every
// unit bond carries line-integral weight exactly 0 or 1.
struct VectorPotential {
  Pulse pulse;
  SpatialProfile profile;
  int d = 1;
  std::array<double, 3> w{1, 0, 0};
  std::array<double, 3> center{0, 0, 0};
  double scale = 1;
  double eta = 0;
  double t1 = 0;  // field-off time: tend, or check_ac(pulse) when that is earlier

  double profile_at(const double* x) const;
  std::array<double, 3> A(double t, const double* x) const;
  std::array<double, 3> electric_field(double t, const double* x) const;  // -eta w psi(x/scale) E_t
  bool active(double t) const { return eta != 0 && A_or_E_nonzero(t); }
  bool A_or_E_nonzero(double t) const;
};

VectorPotential make_vector_potential(Pulse pulse, SpatialProfile profile, int d,
                                      std::array<double, 3> w, double scale, double eta);

// Straight-segment line integrals over a nearest-neighbour bond (|x-y| = 1).
// line_integral_A  : int_0^1 [A(t, a y + (1-a) x)] . (y - x) da
// integrated_bond_field: same with E_A in place of A, bond ordered (x1, x2)
// peierls_phase    : exp(i * line_integral_A)
double line_integral_A(const VectorPotential& vp, double t, const Site& from, const Site& to);
double integrated_bond_field(const VectorPotential& vp, double t, const Site& x1, const Site& x2);
std::complex<double> peierls_phase(const VectorPotential& vp, double t, const Site& x, const Site& y);

}  // namespace lft
