#pragma once
#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "lft/disorder.hpp"
#include "lft/field.hpp"
#include "lft/geometry.hpp"

namespace lft {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr int default_diag_cap = 2500;

// Open-boundary discrete Laplacian: diagonal 2d, -1 between nearest
// neighbours inside the box.
RMat laplacian_real(const Box& box);
Mat laplacian(const Box& box);

// Delta^(A(t)) + lambda*V - mu, hopping entries dressed by the Peierls line
// integral; vp = nullptr gives the static Anderson Hamiltonian.
Mat hamiltonian(const Box& box, const Realization& realization, const DisorderSpec& spec,
                const VectorPotential* vp, double t, double mu = 0);

// H = V diag(eps) V^dagger with ascending eigenvalues, a deterministic basis
// inside (near-)degenerate clusters, and a fixed phase per column.
struct EigenSystem {
  Box box;
  Vec eps;
  Mat V;
  double residual = 0;  // max |(HV - V eps)_ij|
  double hnorm = 1;     // max |H_ij| of the input, for scaled tolerances
};

EigenSystem diagonalize(const Mat& h, const Box& box, int cap = default_diag_cap);

Mat operator_function(const EigenSystem& eig, const std::function<double(double)>& f);

// F_alpha^beta(kappa) = e^{alpha kappa} / (1 + e^{beta kappa}), evaluated in
// overflow-free form for alpha in [0, beta].
double fermi_alpha(double beta, double alpha, double kappa);
inline double fermi_f(double beta, double kappa) { return fermi_alpha(beta, 0.0, kappa); }

Mat fermi_symbol(const EigenSystem& eig, double beta);  // (1 + e^{beta H})^-1
Mat propagator(const EigenSystem& eig, double t);       // e^{-itH}

}  // namespace lft
