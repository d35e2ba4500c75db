#pragma once
#include <array>
#include <utility>
#include <vector>

#include "lft/onebody.hpp"

namespace lft {

// e^{-itH} F_alpha^beta(H) as a dense matrix. Entry (x2, x1) is the
// complex-time two-point function of the ordered pair (x1, x2), so that
// correlation_matrix(.,beta,0,0) = fermi_symbol.
Mat correlation_matrix(const EigenSystem& eig, double beta, double t, double alpha);

cx two_point(const EigenSystem& eig, double beta, double t, double alpha, const Site& x1,
             const Site& x2);

// Truncated four-point map over ordered pairs x = (x1,x2), y = (y1,y2).
cx four_point(const EigenSystem& eig, double beta, double t, double alpha,
              const std::array<Site, 2>& x, const std::array<Site, 2>& y);

// factor * Im(a*(psi1) a(psi2)) with finitely supported coefficients; bond
// currents are the special case I_(x1,x2) = -2 Im(a*_{x2} a_{x1}).
struct CurrentElement {
  std::vector<std::pair<Site, cx>> psi1, psi2;
  double factor = 1;
};
CurrentElement bond_current(const Site& x1, const Site& x2);

// Hermitian one-particle kernel of the element translated by z.
Mat current_kernel(const Box& box, const CurrentElement& elem, const Site& z);

// <I, I'> over centered translate averages on the window of half-side l.
cx fluctuation_inner(const EigenSystem& eig, double beta, int l, const CurrentElement& I,
                     const CurrentElement& Iprime);

// sup-norm shell envelope of |C_{t+i alpha}((0, x))|.
struct DecayRow {
  int radius = 0;
  double envelope = 0;
};
std::vector<DecayRow> decay_profile(const EigenSystem& eig, double beta, double t, double alpha);

}  // namespace lft
