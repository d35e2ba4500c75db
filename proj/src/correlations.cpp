#include "lft/correlations.hpp"

#include <cmath>
#include <stdexcept>

namespace lft {
namespace {

void require_alpha(double beta, double alpha) {
  if (!(beta > 0)) throw std::invalid_argument("correlations require beta > 0");
  if (alpha < 0 || alpha > beta)
    throw std::invalid_argument("imaginary time alpha must lie in [0, beta]");
}

Site translated(const Site& x, const Site& z) {
  return Site{x[0] + z[0], x[1] + z[1], x[2] + z[2]};
}

}  // namespace

Mat correlation_matrix(const EigenSystem& eig, double beta, double t, double alpha) {
  require_alpha(beta, alpha);
  Eigen::VectorXcd ph(eig.eps.size());
  for (long i = 0; i < eig.eps.size(); ++i)
    ph[i] = std::exp(cx(0, -t * eig.eps[i])) * fermi_alpha(beta, alpha, eig.eps[i]);
  return eig.V * ph.asDiagonal() * eig.V.adjoint();
}

cx two_point(const EigenSystem& eig, double beta, double t, double alpha, const Site& x1,
             const Site& x2) {
  const Mat c = correlation_matrix(eig, beta, t, alpha);
  return c(eig.box.index(x2), eig.box.index(x1));
}

cx four_point(const EigenSystem& eig, double beta, double t, double alpha,
              const std::array<Site, 2>& x, const std::array<Site, 2>& y) {
  require_alpha(beta, alpha);
  const Mat c1 = correlation_matrix(eig, beta, t, alpha);
  const Mat c2 = correlation_matrix(eig, beta, -t, beta - alpha);
  const Box& box = eig.box;
  cx acc = 0;
  for (int p = 0; p < 2; ++p) {    // permutation of x components
    for (int q = 0; q < 2; ++q) {  // permutation of y components
      const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
      const long xa = box.index(x[static_cast<size_t>(p)]);
      const long xb = box.index(x[static_cast<size_t>(1 - p)]);
      const long ya = box.index(y[static_cast<size_t>(q)]);
      const long yb = box.index(y[static_cast<size_t>(1 - q)]);
      acc += sign * c1(xa, ya) * c2(yb, xb);
    }
  }
  return acc;
}

CurrentElement bond_current(const Site& x1, const Site& x2) {
  CurrentElement e;
  e.psi1 = {{x2, cx(1, 0)}};
  e.psi2 = {{x1, cx(1, 0)}};
  e.factor = -2.0;
  return e;
}

Mat current_kernel(const Box& box, const CurrentElement& elem, const Site& z) {
  Mat k = Mat::Zero(box.n, box.n);
  for (const auto& [xa, ca] : elem.psi1) {
    for (const auto& [xb, cb] : elem.psi2) {
      const Site a = translated(xa, z), b = translated(xb, z);
      if (!box.contains(a) || !box.contains(b))
        throw std::invalid_argument("current element translate escapes the ambient box");
      const long ia = box.index(a), ib = box.index(b);
      // (psi1 psi2^dagger - psi2 psi1^dagger) / (2i), scaled
      const cx m = elem.factor * ca * std::conj(cb) * cx(0, -0.5);
      k(ia, ib) += m;
      k(ib, ia) += std::conj(m);
    }
  }
  return k;
}

cx fluctuation_inner(const EigenSystem& eig, double beta, int l, const CurrentElement& I,
                     const CurrentElement& Iprime) {
  if (!(beta > 0)) throw std::invalid_argument("fluctuation_inner requires beta > 0");
  if (l < 0) throw std::invalid_argument("fluctuation_inner requires l >= 0");
  const Box window = build_box(eig.box.d, l);
  Mat ka = Mat::Zero(eig.box.n, eig.box.n);
  Mat kb = Mat::Zero(eig.box.n, eig.box.n);
  for (long i = 0; i < window.n; ++i) {
    const Site z = window.site(i);
    ka += current_kernel(eig.box, I, z);
    kb += current_kernel(eig.box, Iprime, z);
  }
  const Mat d0 = fermi_symbol(eig, beta);
  const Mat one_minus = Mat::Identity(eig.box.n, eig.box.n) - d0;
  // rho((F I)* (F I')) with centered translate averages: the Wick-truncated
  // tr(K (1-d) K' d), normalized by the translate count
  return (ka * one_minus * kb * d0).trace() / static_cast<double>(window.n);
}

std::vector<DecayRow> decay_profile(const EigenSystem& eig, double beta, double t, double alpha) {
  const double delta = beta / 10.0;
  if (alpha < delta - 1e-12 || alpha > beta - delta + 1e-12)
    throw std::invalid_argument("decay_profile requires alpha in [beta/10, 9 beta/10]");
  const Mat c = correlation_matrix(eig, beta, t, alpha);
  const Box& box = eig.box;
  const Site origin{0, 0, 0};
  const long col = box.index(origin);
  std::vector<DecayRow> rows(static_cast<size_t>(box.l) + 1);
  for (long i = 0; i < box.n; ++i) {
    const Site x = box.site(i);
    int r = 0;
    for (int k = 0; k < box.d; ++k) r = std::max(r, std::abs(x[k]));
    auto& row = rows[static_cast<size_t>(r)];
    row.radius = r;
    row.envelope = std::max(row.envelope, std::abs(c(i, col)));
  }
  return rows;
}

}  // namespace lft
