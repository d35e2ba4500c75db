#include "lft/ac_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lft {

namespace {

double uniform_step(const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("time grid needs at least 2 points");
  const double h = grid[1] - grid[0];
  if (!(h > 0)) throw std::invalid_argument("time grid must be strictly increasing");
  for (size_t i = 2; i < grid.size(); ++i)
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::max(1.0, h))
      throw std::invalid_argument("time grid must be uniform");
  return h;
}

// (f_n - f_m) / (eps_m - eps_n) >= 0 in the cancellation-free ordered form
double pair_weight(double beta, double e_m, double e_n) {
  const double lo = std::min(e_m, e_n), hi = std::max(e_m, e_n);
  const double delta = lo - hi;
  const double ratio = delta == 0 ? beta : std::expm1(beta * delta) / delta;
  return fermi_f(beta, -hi) * fermi_f(beta, lo) * ratio;
}

}  // namespace

SpectralMeasure spectral_measure(const std::vector<EigenSystem>& ensemble, double beta, int l,
                                 int direction, double bin_width, Exec ex) {
  if (ensemble.empty()) throw std::invalid_argument("empty eigensystem ensemble");
  if (beta <= 0) throw std::invalid_argument("inverse temperature must be positive");
  const int d = ensemble.front().box.d;
  if (direction < 0 || direction >= d) throw std::invalid_argument("direction index out of range");
  for (const EigenSystem& eig : ensemble)
    if (eig.box.d != d || eig.box.l != ensemble.front().box.l)
      throw std::invalid_argument("eigensystem ensemble must share one box shape");

  SpectralMeasure out;
  out.direction = direction;
  out.l = l;
  out.beta = beta;
  out.n = static_cast<long>(ensemble.size());

  double eps_lo = ensemble.front().eps.minCoeff(), eps_hi = ensemble.front().eps.maxCoeff();
  const double per_run = 1.0 / static_cast<double>(ensemble.size());
  std::vector<AveragedCurrents> currents;
  currents.reserve(ensemble.size());
  for (const EigenSystem& eig : ensemble) {
    eps_lo = std::min(eps_lo, eig.eps.minCoeff());
    eps_hi = std::max(eps_hi, eig.eps.maxCoeff());
    currents.push_back(averaged_currents(eig, l));
    const AveragedCurrents& ac = currents.back();
    const Mat& kt = ac.ktilde[static_cast<size_t>(direction)];
    const long n = eig.eps.size();
    const double thresh = 1e-12 * std::max(1.0, eig.hnorm);
    for (long m = 0; m < n; ++m)
      for (long r = 0; r < n; ++r) {
        const double nu = eig.eps(m) - eig.eps(r);
        if (std::abs(nu) <= thresh) continue;
        const double w = pair_weight(beta, eig.eps(m), eig.eps(r)) * std::norm(kt(m, r)) /
                         static_cast<double>(ac.window_sites) * per_run;
        out.min_raw_weight = std::min(out.min_raw_weight, w);
        out.atoms.push_back(SpectralAtom{nu, w});
      }
  }

  // export bins, symmetric around 0 so the evenness of the measure is visible
  const double width = std::max(eps_hi - eps_lo, 1e-12);
  const double bw = bin_width > 0 ? bin_width : width / 400.0;
  const long nb = std::max(1L, static_cast<long>(std::ceil(width / bw)));
  out.bin_edges.resize(static_cast<size_t>(2 * nb + 1));
  for (long j = -nb; j <= nb; ++j)
    out.bin_edges[static_cast<size_t>(j + nb)] = static_cast<double>(j) * bw;
  out.bin_weights.assign(static_cast<size_t>(2 * nb), 0.0);
  for (const SpectralAtom& a : out.atoms) {
    long idx = static_cast<long>(std::floor(a.nu / bw)) + nb;
    idx = std::max(0L, std::min(2 * nb - 1, idx));
    out.bin_weights[static_cast<size_t>(idx)] += a.weight;
  }
  for (double& w : out.bin_weights) w = std::max(w, 0.0);

  // self-validation: the cosine reconstruction must reproduce the ensemble
  // mean of the direct kernel on the same windows
  const std::vector<double> check_grid{0.0, 0.3, 0.7, 1.3, 2.1};
  std::vector<double> recon = reconstruct_xi(out, check_grid, ex);
  std::vector<double> direct(check_grid.size(), 0.0);
  for (size_t i = 0; i < ensemble.size(); ++i) {
    const std::vector<RMat> xi =
        xi_p_from_currents(ensemble[i], beta, currents[i], check_grid, ex);
    for (size_t j = 0; j < check_grid.size(); ++j)
      direct[j] += xi[j](direction, direction) * per_run;
  }
  for (size_t j = 0; j < check_grid.size(); ++j)
    out.calibration_residual = std::max(out.calibration_residual, std::abs(recon[j] - direct[j]));
  if (out.calibration_residual > 1e-6)
    throw std::runtime_error("spectral weight calibration failed: cosine reconstruction off by " +
                             std::to_string(out.calibration_residual));
  return out;
}

std::vector<double> reconstruct_xi(const SpectralMeasure& measure,
                                   const std::vector<double>& tgrid, Exec ex) {
  std::vector<double> out;
  out.reserve(tgrid.size());
  const long na = static_cast<long>(measure.atoms.size());
  for (const double t : tgrid) {
    const double v = chunked_sum(
        na, 0.0,
        [&](long i, double& acc) {
          const SpectralAtom& a = measure.atoms[static_cast<size_t>(i)];
          acc += a.weight * (std::cos(a.nu * t) - 1.0);
        },
        ex);
    out.push_back(v);
  }
  return out;
}

AcFormCheck ac_form_check(const SpectralMeasure& measure, const TransportKernel& kernel,
                          int direction, const Pulse& pulse, const std::vector<double>& tgrid,
                          Exec ex) {
  if (!pulse.ac)
    throw std::invalid_argument("quadratic-form identity needs a compensated (ac) pulse");
  if (direction < 0 || direction >= kernel.d)
    throw std::invalid_argument("direction index out of range");
  const double h = uniform_step(tgrid);
  if (tgrid.front() > pulse.t0 + 1e-12 || tgrid.back() < pulse.tend - 1e-12)
    throw std::invalid_argument("time grid must cover the pulse support");
  if (kernel.tgrid.size() < tgrid.size())
    throw std::invalid_argument("kernel lag grid does not cover the requested times");

  const long nt = static_cast<long>(tgrid.size());
  std::vector<double> e(static_cast<size_t>(nt)), tw(static_cast<size_t>(nt), 1.0);
  for (long i = 0; i < nt; ++i) e[static_cast<size_t>(i)] = pulse.E(tgrid[static_cast<size_t>(i)]);
  tw.front() = 0.5;
  tw.back() = 0.5;

  AcFormCheck out;
  // lhs: (1/2) double trapezoid of xi(|s1 - s2|) e(s2) e(s1)
  out.lhs = 0.5 * h * h *
            chunked_sum(
                nt * nt, 0.0,
                [&](long idx, double& acc) {
                  const long i = idx / nt, j = idx % nt;
                  const long lag = std::labs(i - j);
                  acc += tw[static_cast<size_t>(i)] * tw[static_cast<size_t>(j)] *
                         e[static_cast<size_t>(i)] * e[static_cast<size_t>(j)] *
                         kernel.xi_p[static_cast<size_t>(lag)](direction, direction);
                },
                ex);

  // rhs: (1/2) sum over atoms of w |e_hat(nu)|^2, transform by trapezoid
  const long na = static_cast<long>(measure.atoms.size());
  out.rhs = 0.5 * chunked_sum(
                      na, 0.0,
                      [&](long ai, double& acc) {
                        const SpectralAtom& a = measure.atoms[static_cast<size_t>(ai)];
                        cx ehat = 0;
                        for (long j = 0; j < nt; ++j)
                          ehat += tw[static_cast<size_t>(j)] * e[static_cast<size_t>(j)] *
                                  std::exp(cx(0, -a.nu * tgrid[static_cast<size_t>(j)]));
                        acc += a.weight * std::norm(ehat * h);
                      },
                      ex);
  out.rel_gap = std::abs(out.lhs - out.rhs) / std::max(std::abs(out.lhs), 1e-12);
  out.positive = out.lhs >= -1e-8;
  return out;
}

}  // namespace lft
