#include "lft/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace lft {

namespace {

// int_0^t e^{is delta} ds; the linear branch is more accurate below the
// degeneracy threshold
cx time_integral(double t, double delta, double scale) {
  if (std::abs(delta) <= 1e-12 * scale) return cx(t, 0);
  return (std::exp(cx(0, t * delta)) - 1.0) / cx(0, delta);
}

double freq_scale(const EigenSystem& eig) { return std::max(1.0, eig.hnorm); }

Vec fermi_vector(const EigenSystem& eig, double beta) {
  const long n = eig.eps.size();
  Vec f(n);
  for (long m = 0; m < n; ++m) f(m) = fermi_f(beta, eig.eps(m));
  return f;
}

// transposed entry-product for column-major access: out(r, m) = a(m, r) * b(r, m)
Mat pair_matrix_t(const Mat& a, const Mat& b) { return a.transpose().cwiseProduct(b); }

constexpr int max_pairs = max_dim * max_dim;
struct PairAcc {
  std::array<cx, max_pairs> v{};
};

// sum_{m,r} mats[p](r, m) * g(eps_r - eps_m) for every p at once, reduced
// deterministically over the flattened (m, r) index range
template <class G>
std::array<cx, max_pairs> weighted_sum(const std::vector<Mat>& mats_t, const Vec& eps, G&& g,
                                       Exec ex) {
  const long n = eps.size();
  const int np = static_cast<int>(mats_t.size());
  auto add_item = [&](long i, PairAcc& acc) {
    const long m = i / n, r = i % n;
    const cx val = g(eps(r) - eps(m));
    for (int p = 0; p < np; ++p) acc.v[p] += mats_t[p](r, m) * val;
  };
  auto merge = [np](PairAcc& a, const PairAcc& b) {
    for (int p = 0; p < np; ++p) a.v[p] += b.v[p];
  };
  return chunked_reduce(n * n, PairAcc{}, add_item, merge, ex).v;
}

void check_directions(const EigenSystem& eig, int k, int q) {
  if (k < 0 || k >= eig.box.d || q < 0 || q >= eig.box.d)
    throw std::invalid_argument("direction index out of range for dimension " +
                                std::to_string(eig.box.d));
}

}  // namespace

AveragedCurrents averaged_currents(const EigenSystem& eig, int l) {
  const Box& amb = eig.box;
  if (l < 0) throw std::invalid_argument("averaging half-side must be >= 0");
  if (l + 1 > amb.l)
    throw std::invalid_argument("averaging window of half-side " + std::to_string(l) +
                                " needs a unit-bond margin inside the ambient box of half-side " +
                                std::to_string(amb.l));
  const Box win = build_box(amb.d, l);
  // both endpoints inside the window: the set maps onto itself under every
  // axis reflection, so ensemble-averaged kernels carry no parity artifact
  const std::vector<Bond> bonds = nearest_bonds(win, win);
  AveragedCurrents out;
  out.d = amb.d;
  out.l = l;
  out.window_sites = win.n;
  out.ktilde.reserve(static_cast<size_t>(amb.d));
  for (int k = 0; k < amb.d; ++k) {
    // J_k V assembled row-wise from the two nonzero kernel entries per bond,
    // then rotated with a single product
    Mat kv = Mat::Zero(amb.n, eig.V.cols());
    for (const Bond& b : bonds) {
      if (b.k != k) continue;
      const long hi = amb.index(b.head), ti = amb.index(b.tail);
      kv.row(ti) += cx(0, 1) * eig.V.row(hi);
      kv.row(hi) -= cx(0, 1) * eig.V.row(ti);
    }
    out.ktilde.push_back(eig.V.adjoint() * kv);
  }
  return out;
}

double sigma_p(const EigenSystem& eig, double beta, const BondPair& x, const BondPair& y,
               double t) {
  const Box& box = eig.box;
  if (!box.contains(x.a) || !box.contains(x.b) || !box.contains(y.a) || !box.contains(y.b))
    throw std::invalid_argument("bond pair outside the box");
  const Mat ktx = eig.V.adjoint() * (current_kernel(box, bond_current(x.a, x.b), Site{0, 0, 0}) * eig.V);
  const Mat kty = eig.V.adjoint() * (current_kernel(box, bond_current(y.a, y.b), Site{0, 0, 0}) * eig.V);
  const Vec f = fermi_vector(eig, beta);
  const double scale = freq_scale(eig);
  const long n = eig.eps.size();
  cx s = 0;
  for (long m = 0; m < n; ++m)
    for (long r = 0; r < n; ++r)
      s += kty(m, r) * ktx(r, m) * (f(m) - f(r)) *
           time_integral(t, eig.eps(r) - eig.eps(m), scale);
  return -std::imag(s);  // Re(i s)
}

double sigma_d(const Mat& symbol, const Box& box, const BondPair& x) {
  if (!box.contains(x.a) || !box.contains(x.b))
    throw std::invalid_argument("bond pair outside the box");
  if (symbol.rows() != box.n || symbol.cols() != box.n)
    throw std::invalid_argument("symbol size does not match the box");
  return -2.0 * std::real(symbol(box.index(x.a), box.index(x.b)));
}

std::vector<RMat> xi_p_from_currents(const EigenSystem& eig, double beta,
                                     const AveragedCurrents& currents,
                                     const std::vector<double>& tgrid, Exec ex) {
  const int d = eig.box.d;
  if (currents.d != d || static_cast<int>(currents.ktilde.size()) != d)
    throw std::invalid_argument("averaged currents do not match the eigensystem");
  const Vec f = fermi_vector(eig, beta);
  const long n = eig.eps.size();
  // mats[k*d+q](r, m) = ktilde_k(m, r) ktilde_q(r, m) (f_m - f_r)
  std::vector<Mat> mats;
  mats.reserve(static_cast<size_t>(d) * d);
  for (int k = 0; k < d; ++k)
    for (int q = 0; q < d; ++q) {
      Mat m = pair_matrix_t(currents.ktilde[k], currents.ktilde[q]);
      for (long col = 0; col < n; ++col)
        m.col(col).array() *= (f(col) - f.array()).cast<cx>();
      mats.push_back(std::move(m));
    }
  const double scale = freq_scale(eig);
  std::vector<RMat> out;
  out.reserve(tgrid.size());
  for (const double t : tgrid) {
    const auto sums = weighted_sum(
        mats, eig.eps, [&](double delta) { return time_integral(t, delta, scale); }, ex);
    RMat xi(d, d);
    for (int k = 0; k < d; ++k)
      for (int q = 0; q < d; ++q)
        xi(k, q) = -std::imag(sums[static_cast<size_t>(k * d + q)]) /
                   static_cast<double>(currents.window_sites);
    out.push_back(std::move(xi));
  }
  return out;
}

std::vector<RMat> xi_p_l(const EigenSystem& eig, double beta, int l,
                         const std::vector<double>& tgrid, Exec ex) {
  return xi_p_from_currents(eig, beta, averaged_currents(eig, l), tgrid, ex);
}

RMat xi_d_l(const Mat& symbol, const Box& ambient, int l) {
  if (symbol.rows() != ambient.n || symbol.cols() != ambient.n)
    throw std::invalid_argument("symbol size does not match the ambient box");
  if (l < 0 || l + 1 > ambient.l)
    throw std::invalid_argument("averaging window needs a unit-bond margin inside the ambient box");
  const Box win = build_box(ambient.d, l);
  RMat xi = RMat::Zero(ambient.d, ambient.d);
  for (const Bond& b : nearest_bonds(win, win))
    xi(b.k, b.k) -= 2.0 * std::real(symbol(ambient.index(b.head), ambient.index(b.tail)));
  xi /= static_cast<double>(win.n);
  return xi;
}

RMat xi_d_from_eigensystem(const EigenSystem& eig, double beta, int l) {
  return xi_d_l(fermi_symbol(eig, beta), eig.box, l);
}

TransportKernel realization_kernel(const EigenSystem& eig, double beta, int l,
                                   const std::vector<double>& tgrid, double lambda,
                                   std::uint64_t master_seed, long realization_index, Exec ex) {
  TransportKernel ker;
  ker.tgrid = tgrid;
  ker.d = eig.box.d;
  ker.l = l;
  ker.beta = beta;
  ker.lambda = lambda;
  ker.n = 1;
  ker.master_seed = master_seed;
  ker.realization_index = realization_index;
  ker.xi_p = xi_p_l(eig, beta, l, tgrid, ex);
  ker.xi_p_err.assign(tgrid.size(), RMat::Zero(ker.d, ker.d));
  ker.xi_d = xi_d_from_eigensystem(eig, beta, l);
  ker.xi_d_err = RMat::Zero(ker.d, ker.d);
  return ker;
}

MacroTransport macro_transport(const DisorderSpec& spec, int d, double beta,
                               const std::vector<int>& l_list, long N,
                               const std::vector<double>& tgrid, int margin, double mu,
                               Exec ex) {
  if (N < 2) throw std::invalid_argument("ensemble kernels need at least 2 realizations");
  if (l_list.empty()) throw std::invalid_argument("empty window-size list");
  if (margin < 1) throw std::invalid_argument("ambient margin must be >= 1");
  MacroTransport out;
  const long nt = static_cast<long>(tgrid.size());
  for (const int l : l_list) {
    const Box amb = build_box(d, l + margin);
    std::vector<std::vector<double>> slots(static_cast<size_t>(N));
    auto estimator = [&](const Realization& r) {
      const Mat h = hamiltonian(amb, r, spec, nullptr, 0.0, mu);
      const EigenSystem eig = diagonalize(h, amb);
      const std::vector<RMat> xp = xi_p_l(eig, beta, l, tgrid, ex);
      const RMat xd = xi_d_from_eigensystem(eig, beta, l);
      std::vector<double> v;
      v.reserve(static_cast<size_t>(nt * d * d + d + 2L * d * (d - 1)));
      for (long ti = 0; ti < nt; ++ti)
        for (int k = 0; k < d; ++k)
          for (int q = 0; q < d; ++q) v.push_back(xp[static_cast<size_t>(ti)](k, q));
      for (int k = 0; k < d; ++k) v.push_back(xd(k, k));
      // isotropy samples: lag-averaged xi_p entries per axis pair
      RMat xa = RMat::Zero(d, d);
      for (const RMat& m : xp) xa += m;
      xa /= static_cast<double>(nt);
      for (int k = 0; k < d; ++k)
        for (int q = k + 1; q < d; ++q) {
          v.push_back(xa(k, q));
          v.push_back(xa(q, k));
          v.push_back(xa(k, k) - xa(q, q));
          v.push_back(xd(k, k) - xd(q, q));
        }
      slots[static_cast<size_t>(r.index)] = v;
      return v;
    };
    const EnsembleStats stats = ensemble_mean(estimator, spec, amb, N, ex);

    TransportKernel ker;
    ker.tgrid = tgrid;
    ker.d = d;
    ker.l = l;
    ker.beta = beta;
    ker.lambda = spec.lambda;
    ker.n = N;
    ker.master_seed = spec.master_seed;
    ker.xi_p.assign(static_cast<size_t>(nt), RMat::Zero(d, d));
    ker.xi_p_err.assign(static_cast<size_t>(nt), RMat::Zero(d, d));
    ker.xi_d = RMat::Zero(d, d);
    ker.xi_d_err = RMat::Zero(d, d);
    long pos = 0;
    for (long ti = 0; ti < nt; ++ti)
      for (int k = 0; k < d; ++k)
        for (int q = 0; q < d; ++q) {
          ker.xi_p[static_cast<size_t>(ti)](k, q) = stats.mean[static_cast<size_t>(pos)];
          ker.xi_p_err[static_cast<size_t>(ti)](k, q) = stats.stderr_[static_cast<size_t>(pos)];
          ++pos;
        }
    for (int k = 0; k < d; ++k) {
      ker.xi_d(k, k) = stats.mean[static_cast<size_t>(pos)];
      ker.xi_d_err(k, k) = stats.stderr_[static_cast<size_t>(pos)];
      ++pos;
    }
    std::vector<double> im, ie;
    for (; pos < static_cast<long>(stats.mean.size()); ++pos) {
      im.push_back(stats.mean[static_cast<size_t>(pos)]);
      ie.push_back(stats.stderr_[static_cast<size_t>(pos)]);
    }
    out.iso_mean.push_back(std::move(im));
    out.iso_err.push_back(std::move(ie));

    std::vector<double> dev(static_cast<size_t>(N), 0.0);
    for (long i = 0; i < N; ++i) {
      double m = 0;
      const auto& s = slots[static_cast<size_t>(i)];
      for (size_t j = 0; j < stats.mean.size(); ++j)
        m = std::max(m, std::abs(s[j] - stats.mean[j]));
      dev[static_cast<size_t>(i)] = m;
    }
    out.deviations.push_back(std::move(dev));
    out.kernels.push_back(std::move(ker));
  }
  for (size_t i = 0; i + 1 < out.kernels.size(); ++i) {
    const TransportKernel& a = out.kernels[i];
    const TransportKernel& b = out.kernels[i + 1];
    KernelCauchyRow row;
    row.l_from = a.l;
    row.l_to = b.l;
    for (long ti = 0; ti < nt; ++ti)
      row.dxi_p = std::max(
          row.dxi_p,
          (a.xi_p[static_cast<size_t>(ti)] - b.xi_p[static_cast<size_t>(ti)]).cwiseAbs().maxCoeff());
    row.dxi_d = (a.xi_d - b.xi_d).cwiseAbs().maxCoeff();
    out.cauchy.push_back(row);
  }
  return out;
}

Conductivity conductivity(const TransportKernel& kernel) {
  const int d = kernel.d;
  const long nt = static_cast<long>(kernel.tgrid.size());
  Conductivity out;
  out.tgrid = kernel.tgrid;
  out.sigma_d_scalar = kernel.xi_d.trace() / d;
  out.sigma.reserve(static_cast<size_t>(nt));
  out.sigma_scalar.reserve(static_cast<size_t>(nt));
  for (long i = 0; i < nt; ++i) {
    if (kernel.tgrid[static_cast<size_t>(i)] < 0) {
      out.sigma.push_back(RMat::Zero(d, d));
      out.sigma_scalar.push_back(0);
    } else {
      out.sigma.push_back(kernel.xi_d + kernel.xi_p[static_cast<size_t>(i)]);
      out.sigma_scalar.push_back(out.sigma_d_scalar +
                                 kernel.xi_p[static_cast<size_t>(i)].trace() / d);
    }
  }
  if (nt < 2 || std::abs(kernel.xi_d.determinant()) < 1e-12) {
    out.viscosity_defined = false;
    return out;
  }
  out.viscosity_defined = true;
  const RMat xid_inv = kernel.xi_d.inverse();
  out.viscosity.reserve(static_cast<size_t>(nt));
  auto xp = [&](long i) -> const RMat& { return kernel.xi_p[static_cast<size_t>(i)]; };
  auto tg = [&](long i) { return kernel.tgrid[static_cast<size_t>(i)]; };
  for (long i = 0; i < nt; ++i) {
    RMat deriv(d, d);
    if (i == 0) {
      // a grid starting at 0 is extended evenly, so the derivative vanishes
      if (std::abs(tg(0)) <= 1e-12)
        deriv = RMat::Zero(d, d);
      else
        deriv = (xp(1) - xp(0)) / (tg(1) - tg(0));
    } else if (i == nt - 1) {
      deriv = (xp(i) - xp(i - 1)) / (tg(i) - tg(i - 1));
    } else {
      deriv = (xp(i + 1) - xp(i - 1)) / (tg(i + 1) - tg(i - 1));
    }
    out.viscosity.push_back(xid_inv * deriv);
  }
  return out;
}

GammaCheck gamma_check(const EigenSystem& eig, double beta, int l, int k, int q,
                       const std::vector<double>& tgrid, Exec ex) {
  if (beta <= 0) throw std::invalid_argument("inverse temperature must be positive");
  check_directions(eig, k, q);
  const AveragedCurrents ac = averaged_currents(eig, l);
  const long n = eig.eps.size();
  const Vec f = fermi_vector(eig, beta);
  Vec fbar(n);
  for (long m = 0; m < n; ++m) fbar(m) = fermi_f(beta, -eig.eps(m));
  // w(m, r) = (f_m - f_r) / (eps_r - eps_m) >= 0, evaluated in the
  // cancellation-free ordered form (1 - f_hi) f_lo expm1(beta (e_lo - e_hi)) / (e_lo - e_hi)
  auto wslot = [&](long m, long r) {
    long a = m, b = r;
    if (eig.eps(a) > eig.eps(b)) std::swap(a, b);
    const double delta = eig.eps(a) - eig.eps(b);
    const double ratio = delta == 0 ? beta : std::expm1(beta * delta) / delta;
    return fbar(b) * f(a) * ratio;
  };
  Mat wt = pair_matrix_t(ac.ktilde[static_cast<size_t>(k)], ac.ktilde[static_cast<size_t>(q)]);
  for (long m = 0; m < n; ++m)
    for (long r = 0; r < n; ++r) wt(r, m) *= wslot(m, r);
  const std::vector<Mat> mats{std::move(wt)};

  GammaCheck out;
  out.tgrid = tgrid;
  out.gamma.reserve(tgrid.size());
  for (const double t : tgrid) {
    const auto sums = weighted_sum(
        mats, eig.eps, [&](double delta) { return std::exp(cx(0, t * delta)); }, ex);
    out.gamma.push_back(std::real(sums[0]) / static_cast<double>(ac.window_sites));
  }
  // identity residual against the direct kernel on the same window
  double gamma0 = 0;
  {
    const auto sums = weighted_sum(
        mats, eig.eps, [&](double) { return cx(1, 0); }, ex);
    gamma0 = std::real(sums[0]) / static_cast<double>(ac.window_sites);
  }
  const std::vector<RMat> xi = xi_p_from_currents(eig, beta, ac, tgrid, ex);
  for (size_t i = 0; i < tgrid.size(); ++i)
    out.residual = std::max(out.residual, std::abs(xi[i](k, q) - (out.gamma[i] - gamma0)));
  return out;
}

GreenKubo green_kubo_check(const EigenSystem& eig, double beta, int l,
                           const std::vector<double>& tgrid, int k, int q, Exec ex) {
  if (beta <= 0) throw std::invalid_argument("inverse temperature must be positive");
  check_directions(eig, k, q);
  const AveragedCurrents ac = averaged_currents(eig, l);
  const long n = eig.eps.size();
  const Vec f = fermi_vector(eig, beta);
  Vec fbar(n);
  for (long m = 0; m < n; ++m) fbar(m) = fermi_f(beta, -eig.eps(m));
  // occupied/empty weight f_m (1 - f_r) on the transposed pair matrix
  Mat pt = pair_matrix_t(ac.ktilde[static_cast<size_t>(k)], ac.ktilde[static_cast<size_t>(q)]);
  for (long m = 0; m < n; ++m) pt.col(m).array() *= (f(m) * fbar.array()).cast<cx>();
  const std::vector<Mat> mats{std::move(pt)};
  const double scale = freq_scale(eig);

  GreenKubo out;
  out.tgrid = tgrid;
  out.commutator_form.reserve(tgrid.size());
  for (const double t : tgrid) {
    const auto sums = weighted_sum(
        mats, eig.eps, [&](double delta) { return time_integral(t, delta, scale); }, ex);
    out.commutator_form.push_back(-2.0 * std::imag(sums[0]) /
                                  static_cast<double>(ac.window_sites));
  }
  const std::vector<RMat> xi = xi_p_from_currents(eig, beta, ac, tgrid, ex);
  out.kernel_form.reserve(tgrid.size());
  for (size_t i = 0; i < tgrid.size(); ++i) {
    out.kernel_form.push_back(xi[i](k, q));
    out.residual = std::max(out.residual, std::abs(out.commutator_form[i] - out.kernel_form[i]));
  }
  return out;
}

KernelStructure kernel_structure(const TransportKernel& kernel) {
  KernelStructure ks;
  if (!kernel.xi_p.empty()) {
    ks.zero_residual = kernel.xi_p.front().cwiseAbs().maxCoeff();
    ks.negativity_max_eig = std::numeric_limits<double>::lowest();
  }
  for (const RMat& m : kernel.xi_p) {
    ks.symmetry_residual =
        std::max(ks.symmetry_residual, (m - RMat(m.transpose())).cwiseAbs().maxCoeff());
    const RMat s = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<RMat> es(s);
    ks.negativity_max_eig = std::max(ks.negativity_max_eig, es.eigenvalues().maxCoeff());
  }
  ks.xi_d_min = kernel.xi_d.minCoeff();
  ks.xi_d_max = kernel.xi_d.maxCoeff();
  return ks;
}

double isotropy_margin(const MacroTransport& ensemble) {
  double worst = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t li = 0; li < ensemble.iso_mean.size(); ++li) {
    const std::vector<double>& m = ensemble.iso_mean[li];
    const std::vector<double>& e = ensemble.iso_err[li];
    for (size_t i = 0; i < m.size(); ++i) {
      // absolute cushion for deterministic ensembles whose stderr underflows
      worst = std::max(worst, std::abs(m[i]) - 3.0 * e[i] - 1e-12);
      any = true;
    }
  }
  return any ? worst : 0.0;
}

}  // namespace lft
