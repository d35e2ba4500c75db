#include "lft/energetics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lft/fit.hpp"

namespace lft {

namespace {

double uniform_step(const std::vector<double>& grid, const char* what) {
  if (grid.size() < 2)
    throw std::invalid_argument(std::string(what) + " needs at least 2 points");
  const double h = grid[1] - grid[0];
  if (!(h > 0)) throw std::invalid_argument(std::string(what) + " must be strictly increasing");
  for (size_t i = 2; i < grid.size(); ++i)
    if (std::abs(grid[i] - grid[i - 1] - h) > 1e-9 * std::max(1.0, h))
      throw std::invalid_argument(std::string(what) + " must be uniform");
  return h;
}

void check_lag_coverage(const TransportKernel& kernel, const std::vector<double>& tgrid,
                        double h) {
  if (kernel.tgrid.size() < tgrid.size())
    throw std::invalid_argument("kernel lag grid does not cover the requested times");
  if (std::abs(kernel.tgrid.front()) > 1e-12)
    throw std::invalid_argument("kernel lag grid must start at lag 0");
  const double hk = uniform_step(kernel.tgrid, "kernel lag grid");
  if (std::abs(hk - h) > 1e-9 * std::max(1.0, h))
    throw std::invalid_argument("kernel lag step does not match the time grid step");
}

long lattice_sites(int d, int l) {
  long n = 1;
  for (int k = 0; k < d; ++k) n *= 2L * l + 1;
  return n;
}

}  // namespace

CurrentReport current_densities(const EvolutionRun& run, const Mat& d0, int l,
                                const std::vector<double>& tgrid) {
  const Box& box = run.box;
  if (l < 0 || l + 1 > box.l)
    throw std::invalid_argument("current window needs a unit-bond margin inside the run box");
  if (d0.rows() != box.n || d0.cols() != box.n)
    throw std::invalid_argument("symbol size does not match the run box");
  const Box win = build_box(box.d, l);
  // both endpoints inside the window, matching the kernel's averaging set
  const std::vector<Bond> bonds = nearest_bonds(win, win);
  const double norm = static_cast<double>(win.n);

  CurrentReport rep;
  rep.tgrid = tgrid;
  rep.l = l;
  rep.window_sites = win.n;

  std::array<double, 3> jth{0, 0, 0};
  for (const Bond& b : bonds)
    jth[static_cast<size_t>(b.k)] -= 2.0 * std::imag(d0(box.index(b.head), box.index(b.tail)));
  for (int k = 0; k < box.d; ++k) jth[static_cast<size_t>(k)] /= norm;

  for (const double t : tgrid) {
    const Mat dt = evolve_symbol(d0, run, t);
    const bool dressed = run.vp.active(t);
    std::array<double, 3> jp{0, 0, 0}, jd{0, 0, 0};
    for (const Bond& b : bonds) {
      const size_t k = static_cast<size_t>(b.k);
      const cx dht = dt(box.index(b.head), box.index(b.tail));
      jp[k] -= 2.0 * std::imag(dht);
      if (dressed) {
        // field-corrected observable; its phase runs head -> tail
        const double phi = -line_integral_A(run.vp, t, b.tail, b.head);
        jd[k] -= 2.0 * std::imag((std::exp(cx(0, phi)) - 1.0) * dht);
      }
    }
    for (int k = 0; k < box.d; ++k) {
      jp[static_cast<size_t>(k)] = jp[static_cast<size_t>(k)] / norm - jth[static_cast<size_t>(k)];
      jd[static_cast<size_t>(k)] /= norm;
    }

    // velocity-operator trace on the same window: -tr[d_t P i[conj(hop), X_k] P] / |win|
    std::array<double, 3> jtrace{0, 0, 0};
    for (const Bond& b : bonds) {
      const long hi = box.index(b.head), ti = box.index(b.tail);
      const double phi = dressed ? line_integral_A(run.vp, t, b.tail, b.head) : 0.0;
      const cx contrib =
          cx(0, -1) * std::exp(cx(0, -phi)) * dt(hi, ti) + cx(0, 1) * std::exp(cx(0, phi)) * dt(ti, hi);
      jtrace[static_cast<size_t>(b.k)] += std::real(contrib);
    }
    for (int k = 0; k < box.d; ++k) {
      const size_t ks = static_cast<size_t>(k);
      jtrace[ks] = -jtrace[ks] / norm;
      const double total = jth[ks] + jp[ks] + jd[ks];
      rep.trace_check_residual = std::max(rep.trace_check_residual, std::abs(total - jtrace[ks]));
    }
    rep.j_th.push_back(jth);
    rep.j_p.push_back(jp);
    rep.j_d.push_back(jd);
  }
  return rep;
}

LinearResponse linear_response_current(const TransportKernel& kernel, const Pulse& pulse,
                                       const std::array<double, 3>& w,
                                       const std::vector<double>& tgrid) {
  const double h = uniform_step(tgrid, "time grid");
  check_lag_coverage(kernel, tgrid, h);
  const int d = kernel.d;
  const long nt = static_cast<long>(tgrid.size());
  LinearResponse out;
  out.tgrid = tgrid;
  out.total.assign(tgrid.size(), {0, 0, 0});
  out.paramagnetic.assign(tgrid.size(), {0, 0, 0});
  out.diamagnetic.assign(tgrid.size(), {0, 0, 0});
  std::vector<double> drive(tgrid.size());
  for (long i = 0; i < nt; ++i) drive[static_cast<size_t>(i)] = -pulse.E(tgrid[static_cast<size_t>(i)]);
  for (long i = 0; i < nt; ++i) {
    std::array<double, 3> para{0, 0, 0};
    if (i > 0) {
      for (long j = 0; j <= i; ++j) {
        const double wt = (j == 0 || j == i) ? 0.5 : 1.0;
        const RMat& xi = kernel.xi_p[static_cast<size_t>(i - j)];
        for (int k = 0; k < d; ++k) {
          double row = 0;
          for (int q = 0; q < d; ++q) row += xi(k, q) * w[static_cast<size_t>(q)];
          para[static_cast<size_t>(k)] += wt * row * drive[static_cast<size_t>(j)];
        }
      }
      for (int k = 0; k < d; ++k) para[static_cast<size_t>(k)] *= h;
    }
    // exact drive primitive: minus the pulse primitive
    const double aeps = -pulse.A(tgrid[static_cast<size_t>(i)]);
    std::array<double, 3> dia{0, 0, 0};
    for (int k = 0; k < d; ++k) {
      double row = 0;
      for (int q = 0; q < d; ++q) row += kernel.xi_d(k, q) * w[static_cast<size_t>(q)];
      dia[static_cast<size_t>(k)] = row * aeps;
    }
    for (int k = 0; k < d; ++k)
      out.total[static_cast<size_t>(i)][static_cast<size_t>(k)] =
          para[static_cast<size_t>(k)] + dia[static_cast<size_t>(k)];
    out.paramagnetic[static_cast<size_t>(i)] = para;
    out.diamagnetic[static_cast<size_t>(i)] = dia;
  }
  return out;
}

EnergyLedger energy_increments(const EvolutionRun& run, const Mat& d0,
                               const std::vector<double>& tgrid, int L_trace) {
  const Box& box = run.box;
  if (L_trace < 1 || L_trace > box.l)
    throw std::invalid_argument("trace box must fit inside the run box");
  if (!tgrid.empty()) {
    const int need = padded_half_side(box.d, run.vp.scale, run.vp.profile.kind,
                                      tgrid.back() - run.t0);
    if (L_trace < need)
      throw std::invalid_argument("trace box of half-side " + std::to_string(L_trace) +
                                  " violates the propagation buffer (needs at least " +
                                  std::to_string(need) + ")");
  }
  const Box win = build_box(box.d, L_trace);
  const std::vector<Bond> bonds = nearest_bonds(win, win);
  const double lambda = run.spec.lambda;

  EnergyLedger led;
  led.tgrid = tgrid;
  led.L_trace = L_trace;
  for (const double t : tgrid) {
    const Mat dt = evolve_symbol(d0, run, t);
    const Mat dd = dt - d0;
    double S = 0;
    for (long i = 0; i < win.n; ++i) {
      const Site x = win.site(i);
      const long xi = box.index(x);
      S += (2.0 * box.d + lambda * run.realization.at(x)) * std::real(dd(xi, xi));
    }
    for (const Bond& b : bonds) S -= 2.0 * std::real(dd(box.index(b.tail), box.index(b.head)));

    double P = 0, Id = 0, Ip = S;
    if (run.vp.active(t)) {
      for (const Bond& b : bonds) {
        const long hi = box.index(b.head), ti = box.index(b.tail);
        const cx wth = 1.0 - peierls_phase(run.vp, t, b.tail, b.head);  // W(tail, head)
        P += 2.0 * std::real(dt(hi, ti) * wth);
        Id += 2.0 * std::real(d0(hi, ti) * wth);
        Ip += 2.0 * std::real(dd(hi, ti) * wth);
      }
    }
    led.S.push_back(S);
    led.P.push_back(P);
    led.Ip.push_back(Ip);
    led.Id.push_back(Id);
    led.balance_residual = std::max(led.balance_residual, std::abs(S + P - Ip - Id));
    led.min_S = std::min(led.min_S, S);
  }
  return led;
}

void fill_densities(EnergyLedger& ledger, double eta, long field_sites) {
  if (eta == 0 || field_sites <= 0)
    throw std::invalid_argument("density normalization needs eta != 0 and a nonempty field box");
  const double norm = eta * eta * static_cast<double>(field_sites);
  const size_t nt = ledger.tgrid.size();
  ledger.s.resize(nt);
  ledger.p.resize(nt);
  ledger.ip.resize(nt);
  ledger.id.resize(nt);
  for (size_t i = 0; i < nt; ++i) {
    ledger.s[i] = ledger.S[i] / norm;
    ledger.p[i] = ledger.P[i] / norm;
    ledger.ip[i] = ledger.Ip[i] / norm;
    ledger.id[i] = ledger.Id[i] / norm;
  }
}

EnergySweep energy_densities(const DisorderSpec& spec, long realization_index, int d,
                             const Pulse& pulse, ProfileKind profile_kind,
                             const std::array<double, 3>& w,
                             const std::vector<double>& eta_list, const std::vector<int>& l_list,
                             double beta, double dt, const std::vector<double>& tgrid, double mu,
                             bool antisymmetrize, Exec ex) {
  if (eta_list.empty() || l_list.empty()) throw std::invalid_argument("empty sweep lists");
  for (size_t i = 0; i + 1 < eta_list.size(); ++i)
    if (!(eta_list[i] > eta_list[i + 1]))
      throw std::invalid_argument("field strengths must be strictly decreasing");
  for (const double eta : eta_list)
    if (eta == 0) throw std::invalid_argument("field strengths must be nonzero");
  for (size_t i = 0; i + 1 < l_list.size(); ++i)
    if (!(l_list[i] < l_list[i + 1]))
      throw std::invalid_argument("field box sizes must be strictly increasing");
  if (tgrid.empty()) throw std::invalid_argument("empty time grid");
  uniform_step(tgrid, "time grid");
  if (tgrid.front() < pulse.t0 - 1e-12)
    throw std::invalid_argument("time grid starts before the pulse support");

  EnergySweep sweep;
  sweep.tgrid = tgrid;
  const long ncells = static_cast<long>(eta_list.size() * l_list.size());
  sweep.cells.assign(static_cast<size_t>(ncells), EnergyCell{});

  auto run_cell = [&](long ci) {
    const size_t ei = static_cast<size_t>(ci) % eta_list.size();
    const size_t li = static_cast<size_t>(ci) / eta_list.size();
    const double eta = eta_list[ei];
    const int l = l_list[li];
    const Box box = build_box(d, padded_half_side(d, l, profile_kind, tgrid.back() - pulse.t0));
    const Realization r = sample_realization(spec, box, realization_index);
    SpatialProfile prof;
    prof.kind = profile_kind;
    const VectorPotential vp = make_vector_potential(pulse, prof, d, w, l, eta);
    const EvolutionRun run = evolve(box, r, spec, vp, pulse.t0, tgrid.back(), dt, tgrid, mu);
    const Mat d0 = fermi_symbol(run.eig0, beta);

    EnergyCell cell;
    cell.eta = eta;
    cell.l_field = l;
    cell.field_sites = lattice_sites(d, l);
    cell.ledger = energy_increments(run, d0, tgrid, box.l);
    fill_densities(cell.ledger, eta, cell.field_sites);

    if (antisymmetrize) {
      const VectorPotential vpm = make_vector_potential(pulse, prof, d, w, l, -eta);
      const EvolutionRun runm = evolve(box, r, spec, vpm, pulse.t0, tgrid.back(), dt, tgrid, mu);
      const EnergyLedger lm = energy_increments(runm, d0, tgrid, box.l);
      cell.linear_work.resize(tgrid.size());
      const double norm = 2.0 * std::abs(eta) * static_cast<double>(cell.field_sites);
      for (size_t i = 0; i < tgrid.size(); ++i) {
        double m = std::abs(cell.ledger.S[i] - lm.S[i]);
        m = std::max(m, std::abs(cell.ledger.P[i] - lm.P[i]));
        m = std::max(m, std::abs(cell.ledger.Ip[i] - lm.Ip[i]));
        m = std::max(m, std::abs(cell.ledger.Id[i] - lm.Id[i]));
        cell.linear_work[i] = m / norm;
      }
    }
    sweep.cells[static_cast<size_t>(ci)] = std::move(cell);
  };
  parallel_for(ncells, run_cell, ex);

  // joint-limit stability: consecutive eta pairs at the largest field box
  auto cell_at = [&](size_t ei, size_t li) -> const EnergyCell& {
    return sweep.cells[li * eta_list.size() + ei];
  };
  auto max_density_diff = [&](const EnergyCell& a, const EnergyCell& b) {
    double m = 0;
    for (size_t i = 0; i < tgrid.size(); ++i) {
      m = std::max(m, std::abs(a.ledger.s[i] - b.ledger.s[i]));
      m = std::max(m, std::abs(a.ledger.p[i] - b.ledger.p[i]));
      m = std::max(m, std::abs(a.ledger.ip[i] - b.ledger.ip[i]));
      m = std::max(m, std::abs(a.ledger.id[i] - b.ledger.id[i]));
    }
    return m;
  };
  const size_t lbig = l_list.size() - 1;
  std::vector<double> etas_for_fit;
  for (size_t ei = 0; ei + 1 < eta_list.size(); ++ei) {
    sweep.eta_pair_diffs.push_back(max_density_diff(cell_at(ei, lbig), cell_at(ei + 1, lbig)));
    etas_for_fit.push_back(std::abs(eta_list[ei]));
  }
  if (sweep.eta_pair_diffs.size() >= 2) {
    bool positive = true;
    for (const double v : sweep.eta_pair_diffs) positive = positive && v > 0;
    if (positive) sweep.eta_diff_slope = loglog_slope(etas_for_fit, sweep.eta_pair_diffs);
  }
  const size_t esmall = eta_list.size() - 1;
  for (size_t li = 0; li + 1 < l_list.size(); ++li)
    sweep.l_pair_diffs.push_back(max_density_diff(cell_at(esmall, li), cell_at(esmall, li + 1)));
  return sweep;
}

JoulePrediction joule_predictions(const TransportKernel& kernel, const VectorPotential& vp,
                                  const std::vector<double>& tgrid, long site_normalization) {
  const double h = uniform_step(tgrid, "time grid");
  check_lag_coverage(kernel, tgrid, h);
  if (site_normalization <= 0)
    throw std::invalid_argument("site normalization must be positive");
  const int d = kernel.d;
  const long nt = static_cast<long>(tgrid.size());
  const auto& w = vp.w;

  std::vector<double> drive(static_cast<size_t>(nt)), aeps(static_cast<size_t>(nt));
  for (long i = 0; i < nt; ++i) {
    drive[static_cast<size_t>(i)] = -vp.pulse.E(tgrid[static_cast<size_t>(i)]);
    aeps[static_cast<size_t>(i)] = -vp.pulse.A(tgrid[static_cast<size_t>(i)]);
  }

  // paramagnetic convolution <w, (xi_p * drive w)(t_i)> and its scalar-kernel twin
  std::vector<double> wsum(static_cast<size_t>(nt), 0.0), cq(static_cast<size_t>(nt), 0.0);
  for (long i = 1; i < nt; ++i) {
    std::array<double, 3> conv{0, 0, 0};
    double cscal = 0;
    for (long j = 0; j <= i; ++j) {
      const double wt = (j == 0 || j == i) ? 0.5 : 1.0;
      const RMat& xi = kernel.xi_p[static_cast<size_t>(i - j)];
      const double dj = drive[static_cast<size_t>(j)];
      for (int k = 0; k < d; ++k) {
        double row = 0;
        for (int q = 0; q < d; ++q) row += xi(k, q) * w[static_cast<size_t>(q)];
        conv[static_cast<size_t>(k)] += wt * row * dj;
      }
      cscal += wt * (xi.trace() / d) * dj;
    }
    double s = 0;
    for (int k = 0; k < d; ++k) s += w[static_cast<size_t>(k)] * conv[static_cast<size_t>(k)] * h;
    wsum[static_cast<size_t>(i)] = s;
    cq[static_cast<size_t>(i)] = cscal * h;
  }

  double xidw = 0, wnorm2 = 0;
  for (int k = 0; k < d; ++k) {
    for (int q = 0; q < d; ++q)
      xidw += w[static_cast<size_t>(k)] * kernel.xi_d(k, q) * w[static_cast<size_t>(q)];
    wnorm2 += w[static_cast<size_t>(k)] * w[static_cast<size_t>(k)];
  }
  const double sigma_bar_d = kernel.xi_d.trace() / d;
  const double factor = vp.profile.psi_sq_integral(d) * std::pow(vp.scale, d) /
                        static_cast<double>(site_normalization);

  JoulePrediction out;
  out.tgrid = tgrid;
  out.spatial_factor = vp.profile.psi_sq_integral(d) * std::pow(vp.scale, d);
  out.ip.assign(static_cast<size_t>(nt), 0.0);
  out.id.assign(static_cast<size_t>(nt), 0.0);
  out.s.assign(static_cast<size_t>(nt), 0.0);
  out.p.assign(static_cast<size_t>(nt), 0.0);
  out.e_lin.assign(static_cast<size_t>(nt), 0.0);
  out.q.assign(static_cast<size_t>(nt), 0.0);
  double cum_ip = 0, cum_q = 0;
  for (long i = 0; i < nt; ++i) {
    const size_t is = static_cast<size_t>(i);
    if (i > 0) {
      cum_ip += 0.5 * h * (drive[is - 1] * wsum[is - 1] + drive[is] * wsum[is]);
      cum_q += 0.5 * h * (drive[is - 1] * cq[is - 1] + drive[is] * cq[is]);
    }
    const double ip = factor * cum_ip;
    const double id = -0.5 * aeps[is] * aeps[is] * xidw * factor;
    const double cross = aeps[is] * wsum[is] * factor;
    out.ip[is] = ip;
    out.id[is] = id;
    out.s[is] = ip - cross;
    out.p[is] = id + cross;
    out.e_lin[is] = ip + id;
    out.q[is] = factor * wnorm2 * (cum_q + 0.5 * sigma_bar_d * aeps[is] * aeps[is]);
  }
  return out;
}

}  // namespace lft
