#include "lft/onebody.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace lft {
namespace {

template <class M>
void fix_degenerate_clusters(const Vec& eps, M& V, double gap_tol) {
  using Scalar = typename M::Scalar;
  const long n = eps.size();
  long lo = 0;
  while (lo < n) {
    long hi = lo + 1;
    while (hi < n && eps[hi] - eps[hi - 1] < gap_tol) ++hi;
    const long m = hi - lo;
    if (m > 1) {
      // replace the solver's arbitrary in-cluster basis by Gram-Schmidt of
      // the cluster projector applied to coordinate vectors, in index order
      const M block = V.middleCols(lo, m);
      M accepted(n, m);
      long got = 0;
      for (long j = 0; j < n && got < m; ++j) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> q = block * block.adjoint().col(j);
        for (long a = 0; a < got; ++a) q -= accepted.col(a) * (accepted.col(a).dot(q));
        const double nrm = q.norm();
        if (nrm > 1e-6) accepted.col(got++) = q / nrm;
      }
      if (got == m) V.middleCols(lo, m) = accepted;
    }
    lo = hi;
  }
}

template <class M>
void fix_column_phases(M& V) {
  for (long j = 0; j < V.cols(); ++j) {
    long imax = 0;
    double best = -1;
    for (long i = 0; i < V.rows(); ++i) {
      const double a = std::abs(V(i, j));
      if (a > best + 1e-14) {
        best = a;
        imax = i;
      }
    }
    const typename M::Scalar piv = V(imax, j);
    const double a = std::abs(piv);
    if (a > 0) V.col(j) *= Eigen::numext::conj(piv) / a;
  }
}

}  // namespace

RMat laplacian_real(const Box& box) {
  RMat m = RMat::Zero(box.n, box.n);
  for (long i = 0; i < box.n; ++i) m(i, i) = 2.0 * box.d;
  for (const Bond& b : nearest_bonds(box)) {
    const long i = box.index(b.head), j = box.index(b.tail);
    m(i, j) = -1.0;
    m(j, i) = -1.0;
  }
  return m;
}

Mat laplacian(const Box& box) { return laplacian_real(box).cast<cx>(); }

Mat hamiltonian(const Box& box, const Realization& realization, const DisorderSpec& spec,
                const VectorPotential* vp, double t, double mu) {
  if (realization.box.d != box.d || realization.box.l != box.l)
    throw std::invalid_argument("realization sampled on a different box");
  Mat h = Mat::Zero(box.n, box.n);
  for (long i = 0; i < box.n; ++i) {
    const Site x = box.site(i);
    h(i, i) = 2.0 * box.d + spec.lambda * realization.at(x) - mu;
  }
  const bool dressed = vp && vp->eta != 0 && vp->A_or_E_nonzero(t);
  for (const Bond& b : nearest_bonds(box)) {
    const long i = box.index(b.tail), j = box.index(b.head);
    // <e_x, Delta^A e_y> = -exp(i*int A . dl along x->y)
    const cx ph = dressed ? peierls_phase(*vp, t, b.tail, b.head) : cx(1, 0);
    h(i, j) = -ph;
    h(j, i) = -std::conj(ph);
  }
  return h;
}

EigenSystem diagonalize(const Mat& h, const Box& box, int cap) {
  const long n = h.rows();
  if (n != h.cols() || n != box.n) throw std::invalid_argument("hamiltonian/box size mismatch");
  if (n > cap)
    throw std::length_error("dense diagonalization capped at " + std::to_string(cap) +
                            " sites, got " + std::to_string(n));
  const double hnorm = h.cwiseAbs().maxCoeff();
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, hnorm))
    throw std::invalid_argument("diagonalize requires a Hermitian matrix");

  EigenSystem eig;
  eig.box = box;
  eig.hnorm = std::max(1.0, hnorm);
  const double gap_tol = 1e-9 * eig.hnorm;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<RMat> solver(h.real());
    if (solver.info() != Eigen::Success) throw std::runtime_error("real eigensolver failed to converge");
    eig.eps = solver.eigenvalues();
    RMat V = solver.eigenvectors();
    fix_degenerate_clusters(eig.eps, V, gap_tol);
    fix_column_phases(V);
    eig.V = V.cast<cx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("complex eigensolver failed to converge");
    eig.eps = solver.eigenvalues();
    Mat V = solver.eigenvectors();
    fix_degenerate_clusters(eig.eps, V, gap_tol);
    fix_column_phases(V);
    eig.V = std::move(V);
  }
  eig.residual = (h * eig.V - eig.V * eig.eps.asDiagonal().toDenseMatrix().cast<cx>()).cwiseAbs().maxCoeff();
  if (eig.residual > 1e-10 * eig.hnorm)
    throw std::runtime_error("eigendecomposition residual " + std::to_string(eig.residual) +
                             " exceeds tolerance");
  return eig;
}

Mat operator_function(const EigenSystem& eig, const std::function<double(double)>& f) {
  Vec fe(eig.eps.size());
  for (long i = 0; i < eig.eps.size(); ++i) {
    fe[i] = f(eig.eps[i]);
    if (!std::isfinite(fe[i]))
      throw std::runtime_error("operator_function: f not finite at eigenvalue " +
                               std::to_string(eig.eps[i]));
  }
  return eig.V * fe.asDiagonal() * eig.V.adjoint();
}

double fermi_alpha(double beta, double alpha, double kappa) {
  if (kappa > 0) return std::exp((alpha - beta) * kappa) / (1.0 + std::exp(-beta * kappa));
  return std::exp(alpha * kappa) / (1.0 + std::exp(beta * kappa));
}

Mat fermi_symbol(const EigenSystem& eig, double beta) {
  if (!(beta > 0)) throw std::invalid_argument("fermi_symbol requires beta > 0");
  return operator_function(eig, [beta](double e) { return fermi_f(beta, e); });
}

Mat propagator(const EigenSystem& eig, double t) {
  Eigen::VectorXcd ph(eig.eps.size());
  for (long i = 0; i < eig.eps.size(); ++i) ph[i] = std::exp(cx(0, -t * eig.eps[i]));
  return eig.V * ph.asDiagonal() * eig.V.adjoint();
}

}  // namespace lft
