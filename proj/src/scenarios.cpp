#include "lft/scenarios.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "lft/ac_measure.hpp"
#include "lft/correlations.hpp"
#include "lft/dynamics.hpp"
#include "lft/energetics.hpp"
#include "lft/fit.hpp"
#include "lft/onebody.hpp"
#include "lft/transport.hpp"

namespace lft {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

class Csv {
 public:
  Csv(const fs::path& dir, const std::string& name, const std::vector<std::string>& header,
      std::vector<std::string>& files)
      : out_(dir / name) {
    if (!out_) throw std::runtime_error("cannot open " + (dir / name).string());
    row(header);
    files.push_back(name);
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

// Provenance prefix shared by every CSV row.
std::vector<std::string> prov(std::uint64_t seed, long realization, int l, double beta,
                              double lambda, double eta) {
  return {fmt(seed), fmt(realization), fmt(l), fmt(beta), fmt(lambda), fmt(eta)};
}
const std::vector<std::string> prov_header = {"seed", "realization", "l",
                                              "beta", "lambda",      "eta"};

std::vector<std::string> with_prov(std::vector<std::string> p,
                                   std::initializer_list<std::string> rest) {
  p.insert(p.end(), rest);
  return p;
}
std::vector<std::string> header_with(std::initializer_list<std::string> rest) {
  return with_prov(prov_header, rest);
}

std::vector<double> lag_grid(const RunConfig& cfg) {
  std::vector<double> lags = cfg.tgrid();
  const double off = lags.front();
  for (double& t : lags) t -= off;
  return lags;
}

// ---------------------------------------------------------------- transport

json scen_transport(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                    Exec ex) {
  const std::vector<double> lags = lag_grid(cfg);
  const MacroTransport mt = macro_transport(cfg.disorder(), cfg.d, cfg.beta, cfg.l_list,
                                            cfg.n_realizations, lags, cfg.margin, cfg.mu, ex);

  Csv kcsv(dir, "kernels.csv", header_with({"kind", "t", "k", "q", "value", "stderr"}), files);
  for (const TransportKernel& ker : mt.kernels) {
    const auto p = prov(cfg.master_seed, -1, ker.l, cfg.beta, cfg.lambda, 0.0);
    for (size_t i = 0; i < ker.xi_p.size(); ++i)
      for (int k = 0; k < ker.d; ++k)
        for (int q = 0; q < ker.d; ++q)
          kcsv.row(with_prov(p, {"paramagnetic", fmt(lags[i]), fmt(k), fmt(q),
                                 fmt(ker.xi_p[i](k, q)), fmt(ker.xi_p_err[i](k, q))}));
    for (int k = 0; k < ker.d; ++k)
      for (int q = 0; q < ker.d; ++q)
        kcsv.row(with_prov(p, {"diamagnetic", fmt(0.0), fmt(k), fmt(q), fmt(ker.xi_d(k, q)),
                               fmt(ker.xi_d_err(k, q))}));
  }

  Csv dcsv(dir, "deviations.csv", header_with({"max_abs_deviation"}), files);
  for (size_t li = 0; li < mt.kernels.size(); ++li)
    for (size_t r = 0; r < mt.deviations[li].size(); ++r)
      dcsv.row(with_prov(prov(cfg.master_seed, static_cast<long>(r), mt.kernels[li].l, cfg.beta,
                              cfg.lambda, 0.0),
                         {fmt(mt.deviations[li][r])}));

  Csv ccsv(dir, "cauchy.csv", {"seed", "beta", "lambda", "l_from", "l_to", "dxi_p", "dxi_d"},
           files);
  for (const KernelCauchyRow& row : mt.cauchy)
    ccsv.row({fmt(cfg.master_seed), fmt(cfg.beta), fmt(cfg.lambda), fmt(row.l_from),
              fmt(row.l_to), fmt(row.dxi_p), fmt(row.dxi_d)});

  KernelStructure worst;
  worst.negativity_max_eig = std::numeric_limits<double>::lowest();
  worst.xi_d_min = std::numeric_limits<double>::infinity();
  worst.xi_d_max = std::numeric_limits<double>::lowest();
  for (const TransportKernel& ker : mt.kernels) {
    const KernelStructure ks = kernel_structure(ker);
    worst.zero_residual = std::max(worst.zero_residual, ks.zero_residual);
    worst.symmetry_residual = std::max(worst.symmetry_residual, ks.symmetry_residual);
    worst.negativity_max_eig = std::max(worst.negativity_max_eig, ks.negativity_max_eig);
    worst.xi_d_min = std::min(worst.xi_d_min, ks.xi_d_min);
    worst.xi_d_max = std::max(worst.xi_d_max, ks.xi_d_max);
  }
  const double iso_margin = isotropy_margin(mt);
  const bool range_ok = worst.xi_d_min >= -2.0 - 1e-9 && worst.xi_d_max <= 2.0 + 1e-9;
  const bool iso_ok = iso_margin <= 0.0;

  const TransportKernel& last = mt.kernels.back();
  const double macro_xi_d = last.xi_d.trace() / last.d;
  const double macro_xi_d_err = last.xi_d_err.trace() / last.d;
  const double macro_xi_p = last.xi_p.back().trace() / last.d;
  const double macro_xi_p_err = last.xi_p_err.back().trace() / last.d;
  const double cauchy_d = mt.cauchy.empty() ? 0.0 : mt.cauchy.back().dxi_d;
  const double cauchy_p = mt.cauchy.empty() ? 0.0 : mt.cauchy.back().dxi_p;

  json j;
  j["xi_p_zero_residual"] = worst.zero_residual;
  j["xi_p_symmetry_residual"] = worst.symmetry_residual;
  j["xi_p_negativity_max_eig"] = worst.negativity_max_eig;
  j["xi_d_range_ok"] = range_ok;
  j["xi_d_min_entry"] = worst.xi_d_min;
  j["xi_d_max_entry"] = worst.xi_d_max;
  j["isotropy_ok"] = iso_ok;
  j["isotropy_worst_margin"] = iso_margin;
  json cau = json::array();
  for (const KernelCauchyRow& row : mt.cauchy)
    cau.push_back({{"l_from", row.l_from},
                   {"l_to", row.l_to},
                   {"dxi_p", row.dxi_p},
                   {"dxi_d", row.dxi_d}});
  j["cauchy"] = cau;
  j["macro_limit"] = {{"l", last.l},
                      {"xi_d_scalar", macro_xi_d},
                      {"xi_d_uncertainty", macro_xi_d_err + cauchy_d},
                      {"xi_p_final_scalar", macro_xi_p},
                      {"xi_p_final_uncertainty", macro_xi_p_err + cauchy_p}};
  j["pass"] = worst.zero_residual <= 1e-12 && worst.symmetry_residual <= 1e-10 &&
              worst.negativity_max_eig <= 1e-8 && range_ok && iso_ok;
  return j;
}

// --------------------------------------------------------------------- ohm

json scen_ohm(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
              Exec ex) {
  const int l = cfg.l_list.back();
  const int dirn = cfg.direction;
  const Pulse pulse = cfg.make_pulse();
  const std::vector<double> tgrid = cfg.tgrid();
  const std::vector<double> lags = lag_grid(cfg);
  const DisorderSpec spec = cfg.disorder();
  const double duration = cfg.t_max - cfg.pulse_t0;
  // indicator support aligned with the kernel's bond set: weight exactly 1 on
  // the window's interior bonds, 0 elsewhere
  const double field_scale = static_cast<double>(l);
  const Box amb =
      build_box(cfg.d, padded_half_side(cfg.d, field_scale, ProfileKind::indicator, duration));
  std::array<double, 3> w{0, 0, 0};
  w[static_cast<size_t>(dirn)] = 1.0;

  std::vector<double> etas;
  for (double e : cfg.eta_list)
    if (e != 0) etas.push_back(std::abs(e));

  Csv ccsv(dir, "currents.csv",
           header_with({"t", "j_th", "j_p", "j_d", "j_p_over_eta", "j_d_over_eta", "j_lin_para",
                        "j_lin_dia"}),
           files);
  Csv rcsv(dir, "residuals.csv",
           header_with({"channel", "max_abs_residual"}), files);

  json runs = json::array();
  bool pass = true;
  double j0_residual = 0, worst_trace = 0;
  for (long r = 0; r < cfg.n_realizations; ++r) {
    const Realization rom = sample_realization(spec, amb, r);
    const EigenSystem eig =
        diagonalize(hamiltonian(amb, rom, spec, nullptr, cfg.pulse_t0, cfg.mu), amb);
    const TransportKernel kern =
        realization_kernel(eig, cfg.beta, l, lags, cfg.lambda, cfg.master_seed, r, ex);
    const Mat d0 = fermi_symbol(eig, cfg.beta);
    const LinearResponse lr = linear_response_current(kern, pulse, w, tgrid);

    std::vector<double> resid_p, resid_d;
    for (const double eta : etas) {
      const VectorPotential vp =
          make_vector_potential(pulse, SpatialProfile{ProfileKind::indicator}, cfg.d, w,
                                field_scale, eta);
      const EvolutionRun run =
          evolve(amb, rom, spec, vp, cfg.pulse_t0, cfg.t_max, cfg.dt, tgrid, cfg.mu);
      const CurrentReport rep = current_densities(run, d0, l, tgrid);
      worst_trace = std::max(worst_trace, rep.trace_check_residual);

      double ep = 0, ed = 0;
      const size_t kd = static_cast<size_t>(dirn);
      for (size_t i = 0; i < tgrid.size(); ++i) {
        const double jp = rep.j_p[i][kd], jd = rep.j_d[i][kd];
        ep = std::max(ep, std::abs(jp / eta - lr.paramagnetic[i][kd]));
        ed = std::max(ed, std::abs(jd / eta - lr.diamagnetic[i][kd]));
        ccsv.row(with_prov(prov(cfg.master_seed, r, l, cfg.beta, cfg.lambda, eta),
                           {fmt(tgrid[i]), fmt(rep.j_th[i][kd]), fmt(jp), fmt(jd),
                            fmt(jp / eta), fmt(jd / eta), fmt(lr.paramagnetic[i][kd]),
                            fmt(lr.diamagnetic[i][kd])}));
      }
      j0_residual = std::max({j0_residual, std::abs(rep.j_p[0][kd]), std::abs(rep.j_d[0][kd])});
      resid_p.push_back(ep);
      resid_d.push_back(ed);
      rcsv.row(with_prov(prov(cfg.master_seed, r, l, cfg.beta, cfg.lambda, eta),
                         {"paramagnetic", fmt(ep)}));
      rcsv.row(with_prov(prov(cfg.master_seed, r, l, cfg.beta, cfg.lambda, eta),
                         {"diamagnetic", fmt(ed)}));
    }
    const double slope_p = loglog_slope(etas, resid_p);
    const double slope_d = loglog_slope(etas, resid_d);
    const bool ok = std::abs(slope_p - 1.0) <= 0.3 && std::abs(slope_d - 1.0) <= 0.3;
    pass = pass && ok;
    runs.push_back({{"realization", r},
                    {"slope_paramagnetic", slope_p},
                    {"slope_diamagnetic", slope_d},
                    {"residuals_paramagnetic", resid_p},
                    {"residuals_diamagnetic", resid_d},
                    {"ok", ok}});
  }

  json j;
  j["window_half_side"] = l;
  j["profile"] = "indicator";
  j["field_scale"] = field_scale;
  j["per_realization"] = runs;
  j["initial_current_residual"] = j0_residual;
  j["trace_check_residual"] = worst_trace;
  j["pass"] = pass && j0_residual <= 1e-12;
  return j;
}

// ------------------------------------------------------------------- joule

json scen_joule(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                Exec ex) {
  const Pulse pulse = cfg.make_pulse();
  const std::vector<double> tgrid = cfg.tgrid();
  const std::vector<double> lags = lag_grid(cfg);
  const DisorderSpec spec = cfg.disorder();
  std::array<double, 3> w{0, 0, 0};
  w[static_cast<size_t>(cfg.direction)] = 1.0;
  const long r = 0;  // same-realization comparison

  // measured densities (smooth bump per the scaled-field design)
  const EnergySweep sweep =
      energy_densities(spec, r, cfg.d, pulse, ProfileKind::bump, w, cfg.eta_list, cfg.l_list,
                       cfg.beta, cfg.dt, tgrid, cfg.mu, /*antisymmetrize=*/true, ex);

  Csv mcsv(dir, "densities.csv",
           header_with({"t", "s", "p", "ip", "id", "linear_work"}), files);
  for (const EnergyCell& cell : sweep.cells) {
    const auto p = prov(cfg.master_seed, r, cell.l_field, cfg.beta, cfg.lambda, cell.eta);
    for (size_t i = 0; i < tgrid.size(); ++i)
      mcsv.row(with_prov(p, {fmt(tgrid[i]), fmt(cell.ledger.s[i]), fmt(cell.ledger.p[i]),
                             fmt(cell.ledger.ip[i]), fmt(cell.ledger.id[i]),
                             fmt(cell.linear_work.empty() ? 0.0 : cell.linear_work[i])}));
  }

  // same-realization kernel predictions per field size
  Csv pcsv(dir, "predictions.csv",
           header_with({"t", "ip", "id", "s", "p", "e_lin", "q"}), files);
  const double eta_min = cfg.eta_list.back();
  json per_l = json::array();
  std::vector<double> rel_errors;
  double balance = 0, min_s = 0, thermal_work = 0;
  for (const EnergyCell& cell : sweep.cells) {
    balance = std::max(balance, cell.ledger.balance_residual);
    min_s = std::min(min_s, cell.ledger.min_S);
    if (!cell.linear_work.empty())
      thermal_work = std::max(thermal_work,
                              *std::max_element(cell.linear_work.begin(), cell.linear_work.end()));
  }
  for (const int lf : cfg.l_list) {
    const Box kbox = build_box(cfg.d, lf + cfg.margin);
    const Realization rom = sample_realization(spec, kbox, r);
    const EigenSystem eig =
        diagonalize(hamiltonian(kbox, rom, spec, nullptr, cfg.pulse_t0, cfg.mu), kbox);
    const TransportKernel kern =
        realization_kernel(eig, cfg.beta, lf, lags, cfg.lambda, cfg.master_seed, r, ex);
    const VectorPotential vp = make_vector_potential(pulse, SpatialProfile{ProfileKind::bump},
                                                     cfg.d, w, static_cast<double>(lf), eta_min);
    long sites = 1;
    for (int k = 0; k < cfg.d; ++k) sites *= 2L * lf + 1;
    const JoulePrediction pred = joule_predictions(kern, vp, tgrid, sites);
    const auto p = prov(cfg.master_seed, r, lf, cfg.beta, cfg.lambda, eta_min);
    for (size_t i = 0; i < tgrid.size(); ++i)
      pcsv.row(with_prov(p, {fmt(tgrid[i]), fmt(pred.ip[i]), fmt(pred.id[i]), fmt(pred.s[i]),
                             fmt(pred.p[i]), fmt(pred.e_lin[i]), fmt(pred.q[i])}));

    // measured cell at (eta_min, lf)
    const EnergyCell* cell = nullptr;
    for (const EnergyCell& c : sweep.cells)
      if (c.l_field == lf && c.eta == eta_min) cell = &c;
    if (!cell) throw std::logic_error("sweep cell lookup failed");
    double num = 0, den = 0;
    for (size_t i = 0; i < tgrid.size(); ++i) {
      num = std::max(num, std::abs(cell->ledger.ip[i] - pred.ip[i]));
      den = std::max(den, std::abs(pred.ip[i]));
    }
    const double rel = num / std::max(den, 1e-300);
    rel_errors.push_back(rel);
    per_l.push_back({{"l", lf},
                     {"relative_ip_error", rel},
                     {"spatial_factor", pred.spatial_factor},
                     {"prediction_scale", den}});
  }

  bool ratios_ok = true;
  json ratios = json::array();
  for (size_t i = 1; i < rel_errors.size(); ++i) {
    const double ratio = rel_errors[i] / std::max(rel_errors[i - 1], 1e-300);
    ratios.push_back(ratio);
    ratios_ok = ratios_ok && ratio <= 0.7;
  }

  json j;
  j["per_l"] = per_l;
  j["error_ratios"] = ratios;
  j["relative_ip_error_first"] = rel_errors.front();
  j["eta_diff_slope"] = sweep.eta_diff_slope;
  j["eta_pair_diffs"] = sweep.eta_pair_diffs;
  j["l_pair_diffs"] = sweep.l_pair_diffs;
  j["balance_residual"] = balance;
  j["min_entropic_increment"] = min_s;
  j["thermal_work_density"] = thermal_work;
  j["pass"] = rel_errors.front() <= 0.10 && ratios_ok && balance <= 1e-8 &&
              min_s >= -1e-10 && std::abs(sweep.eta_diff_slope - 1.0) <= 0.3;
  return j;
}

// --------------------------------------------------------------- greenkubo

json scen_greenkubo(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                    Exec ex) {
  const int l = cfg.l_list.back();
  const std::vector<double> lags = lag_grid(cfg);
  const DisorderSpec spec = cfg.disorder();
  const Box box = build_box(cfg.d, l + cfg.margin);
  const int k = cfg.direction;

  Csv gcsv(dir, "greenkubo.csv",
           header_with({"k", "q", "t", "gamma", "commutator_form", "kernel_form"}), files);
  double worst_gk = 0, worst_gamma = 0;
  json runs = json::array();
  for (long r = 0; r < cfg.n_realizations; ++r) {
    const Realization rom = sample_realization(spec, box, r);
    const EigenSystem eig = diagonalize(hamiltonian(box, rom, spec, nullptr, 0.0, cfg.mu), box);
    std::vector<std::array<int, 2>> pairs{{k, k}};
    if (cfg.d >= 2) pairs.push_back({0, 1});
    json rj = json::array();
    for (const auto& pq : pairs) {
      const GammaCheck gam = gamma_check(eig, cfg.beta, l, pq[0], pq[1], lags, ex);
      const GreenKubo gk = green_kubo_check(eig, cfg.beta, l, lags, pq[0], pq[1], ex);
      worst_gamma = std::max(worst_gamma, gam.residual);
      worst_gk = std::max(worst_gk, gk.residual);
      const auto p = prov(cfg.master_seed, r, l, cfg.beta, cfg.lambda, 0.0);
      for (size_t i = 0; i < lags.size(); ++i)
        gcsv.row(with_prov(p, {fmt(pq[0]), fmt(pq[1]), fmt(lags[i]), fmt(gam.gamma[i]),
                               fmt(gk.commutator_form[i]), fmt(gk.kernel_form[i])}));
      rj.push_back({{"k", pq[0]},
                    {"q", pq[1]},
                    {"gamma_residual", gam.residual},
                    {"green_kubo_residual", gk.residual}});
    }
    runs.push_back({{"realization", r}, {"pairs", rj}});
  }

  json j;
  j["per_realization"] = runs;
  j["max_gamma_residual"] = worst_gamma;
  j["max_green_kubo_residual"] = worst_gk;
  j["pass"] = worst_gk <= 1e-7 && worst_gamma <= 1e-7;
  return j;
}

// --------------------------------------------------------------- acmeasure

json scen_acmeasure(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                    Exec ex) {
  const int l = cfg.l_list.back();
  const int dirn = cfg.direction;
  const std::vector<double> lags = lag_grid(cfg);
  const DisorderSpec spec = cfg.disorder();
  const Box box = build_box(cfg.d, l + cfg.margin);

  std::vector<EigenSystem> ensemble;
  ensemble.reserve(static_cast<size_t>(cfg.n_realizations));
  for (long r = 0; r < cfg.n_realizations; ++r) {
    const Realization rom = sample_realization(spec, box, r);
    ensemble.push_back(diagonalize(hamiltonian(box, rom, spec, nullptr, 0.0, cfg.mu), box));
  }

  const SpectralMeasure measure =
      spectral_measure(ensemble, cfg.beta, l, dirn, cfg.bin_width, ex);

  // ensemble-mean paramagnetic kernel of the same eigensystems
  TransportKernel kern;
  kern.tgrid = lags;
  kern.d = cfg.d;
  kern.l = l;
  kern.beta = cfg.beta;
  kern.lambda = cfg.lambda;
  kern.n = cfg.n_realizations;
  kern.master_seed = cfg.master_seed;
  kern.xi_d = RMat::Zero(cfg.d, cfg.d);
  kern.xi_d_err = RMat::Zero(cfg.d, cfg.d);
  for (const EigenSystem& eig : ensemble) {
    const AveragedCurrents cur = averaged_currents(eig, l);
    const std::vector<RMat> xp = xi_p_from_currents(eig, cfg.beta, cur, lags, ex);
    if (kern.xi_p.empty())
      kern.xi_p.assign(xp.size(), RMat::Zero(cfg.d, cfg.d));
    for (size_t i = 0; i < xp.size(); ++i) kern.xi_p[i] += xp[i];
    kern.xi_d += xi_d_from_eigensystem(eig, cfg.beta, l);
  }
  for (RMat& m : kern.xi_p) m /= static_cast<double>(cfg.n_realizations);
  kern.xi_d /= static_cast<double>(cfg.n_realizations);
  kern.xi_p_err.assign(kern.xi_p.size(), RMat::Zero(cfg.d, cfg.d));

  // cosine reconstruction against the direct kernel on the report grid
  const std::vector<double> recon = reconstruct_xi(measure, lags, ex);
  double recon_residual = 0;
  for (size_t i = 0; i < lags.size(); ++i)
    recon_residual = std::max(recon_residual, std::abs(recon[i] - kern.xi_p[i](dirn, dirn)));

  Csv bcsv(dir, "bins.csv", header_with({"nu_lo", "nu_hi", "weight"}), files);
  const auto pm = prov(cfg.master_seed, -1, l, cfg.beta, cfg.lambda, 0.0);
  for (size_t b = 0; b + 1 < measure.bin_edges.size(); ++b)
    bcsv.row(with_prov(pm, {fmt(measure.bin_edges[b]), fmt(measure.bin_edges[b + 1]),
                            fmt(measure.bin_weights[b])}));
  if (measure.atoms.size() <= 200000) {
    Csv acsv(dir, "atoms.csv", header_with({"nu", "weight"}), files);
    for (const SpectralAtom& a : measure.atoms)
      acsv.row(with_prov(pm, {fmt(a.nu), fmt(a.weight)}));
  }

  // in-phase quadratic-form identity for three seeded AC pulses
  json pulses = json::array();
  bool dual_ok = true;
  Csv fcsv(dir, "ac_forms.csv",
           header_with({"pulse_seed", "lhs", "rhs", "rel_gap"}), files);
  const std::vector<double> tg = cfg.tgrid();
  const double hstep = tg[1] - tg[0];
  const long np = 1 + static_cast<long>(
                          std::ceil((cfg.pulse_tend - cfg.pulse_t0) / hstep - 1e-9));
  if (np > static_cast<long>(tg.size()))
    throw std::invalid_argument(
        "numerics.t_max must reach the pulse end for the acmeasure scenario");
  std::vector<double> ptimes(static_cast<size_t>(np));
  for (long i = 0; i < np; ++i)
    ptimes[static_cast<size_t>(i)] = cfg.pulse_t0 + hstep * static_cast<double>(i);
  for (std::uint64_t s : {11ull, 12ull, 13ull}) {
    const Pulse pulse = make_seeded_ac_pulse(cfg.pulse_t0, cfg.pulse_tend, 129, s);
    const AcFormCheck fc = ac_form_check(measure, kern, dirn, pulse, ptimes, ex);
    dual_ok = dual_ok && fc.positive && fc.rel_gap <= 1e-3;
    fcsv.row(with_prov(pm, {fmt(s), fmt(fc.lhs), fmt(fc.rhs), fmt(fc.rel_gap)}));
    pulses.push_back(
        {{"seed", s}, {"lhs", fc.lhs}, {"rhs", fc.rhs}, {"rel_gap", fc.rel_gap},
         {"positive", fc.positive}});
  }

  json j;
  j["atoms"] = measure.atoms.size();
  j["min_raw_weight"] = measure.min_raw_weight;
  j["calibration_residual"] = measure.calibration_residual;
  j["reconstruction_residual"] = recon_residual;
  j["pulse_checks"] = pulses;
  j["pass"] = measure.min_raw_weight >= -1e-10 && recon_residual <= 1e-6 && dual_ok;
  return j;
}

// ----------------------------------------------------------------- ergodic

json scen_ergodic(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                  Exec ex) {
  const DisorderSpec spec = cfg.disorder();
  // potential space average: variance must scale like 1/|Lambda|
  auto pot_avg = [](const Realization& r, const Box& box) {
    double s = 0;
    for (long i = 0; i < box.n; ++i) s += r.values[static_cast<size_t>(i)];
    return s / static_cast<double>(box.n);
  };
  // ballistic coefficient entry on the window inside the sampled box
  const double beta = cfg.beta, mu = cfg.mu;
  const int dirn = cfg.direction;
  auto xi_d_entry = [&spec, beta, mu, dirn](const Realization& r, const Box& box) {
    const EigenSystem eig = diagonalize(hamiltonian(box, r, spec, nullptr, 0.0, mu), box);
    const RMat xd = xi_d_from_eigensystem(eig, beta, box.l - 1);
    return xd(dirn, dirn);
  };

  const SelfAveragingTable pot =
      self_averaging_diagnostic(pot_avg, spec, cfg.d, cfg.l_list, cfg.n_realizations, ex);
  const SelfAveragingTable xid =
      self_averaging_diagnostic(xi_d_entry, spec, cfg.d, cfg.l_list, cfg.n_realizations, ex);

  Csv scsv(dir, "self_averaging.csv",
           {"seed", "quantity", "l", "sites", "mean", "variance"}, files);
  for (const SelfAveragingRow& row : pot.rows)
    scsv.row({fmt(cfg.master_seed), "potential_average", fmt(row.l), fmt(row.sites),
              fmt(row.mean), fmt(row.variance)});
  for (const SelfAveragingRow& row : xid.rows)
    scsv.row({fmt(cfg.master_seed), "xi_d_entry", fmt(row.l), fmt(row.sites), fmt(row.mean),
              fmt(row.variance)});

  json j;
  j["potential_average_slope"] = pot.slope;
  j["xi_d_entry_slope"] = xid.slope;
  j["n_realizations"] = cfg.n_realizations;
  j["pass"] = std::abs(xid.slope + 1.0) <= 0.3 && std::abs(pot.slope + 1.0) <= 0.15;
  return j;
}

// ------------------------------------------------------------------- decay

json scen_decay(const RunConfig& cfg, const fs::path& dir, std::vector<std::string>& files,
                Exec ex) {
  (void)ex;
  const DisorderSpec spec = cfg.disorder();
  const Box box = build_box(cfg.d, cfg.l_list.back() + cfg.margin);
  const Realization rom = sample_realization(spec, box, 0);
  const EigenSystem eig = diagonalize(hamiltonian(box, rom, spec, nullptr, 0.0, cfg.mu), box);

  Csv dcsv(dir, "decay.csv", header_with({"t", "alpha", "radius", "envelope"}), files);
  const auto p = prov(cfg.master_seed, 0, box.l, cfg.beta, cfg.lambda, 0.0);
  bool finite = true;
  json curves = json::array();
  for (const double t : {0.0, cfg.t_max}) {
    const double alpha = cfg.beta / 2.0;
    const std::vector<DecayRow> rows = decay_profile(eig, cfg.beta, t, alpha);
    double head = rows.empty() ? 0.0 : rows.front().envelope;
    double tail = rows.empty() ? 0.0 : rows.back().envelope;
    for (const DecayRow& row : rows) {
      finite = finite && std::isfinite(row.envelope);
      dcsv.row(with_prov(p, {fmt(t), fmt(alpha), fmt(row.radius), fmt(row.envelope)}));
    }
    curves.push_back({{"t", t}, {"alpha", alpha}, {"head", head}, {"tail", tail}});
  }

  json j;
  j["curves"] = curves;
  j["finite"] = finite;
  j["pass"] = finite;
  return j;
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& cfg, Exec ex) {
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);

  ScenarioResult res;
  {
    std::ofstream echo(dir / "resolved_config.json");
    if (!echo) throw std::runtime_error("cannot write to " + dir.string());
    echo << cfg.to_json();
    res.files.push_back("resolved_config.json");
  }

  json j;
  switch (cfg.scenario) {
    case Scenario::transport: j = scen_transport(cfg, dir, res.files, ex); break;
    case Scenario::ohm: j = scen_ohm(cfg, dir, res.files, ex); break;
    case Scenario::joule: j = scen_joule(cfg, dir, res.files, ex); break;
    case Scenario::greenkubo: j = scen_greenkubo(cfg, dir, res.files, ex); break;
    case Scenario::acmeasure: j = scen_acmeasure(cfg, dir, res.files, ex); break;
    case Scenario::ergodic: j = scen_ergodic(cfg, dir, res.files, ex); break;
    case Scenario::decay: j = scen_decay(cfg, dir, res.files, ex); break;
  }
  j["scenario"] = scenario_name(cfg.scenario);
  res.pass = j.at("pass").get<bool>();

  res.summary_json = j.dump(2) + "\n";
  {
    std::ofstream out(dir / "summary.json");
    out << res.summary_json;
    res.files.push_back("summary.json");
  }
  return res;
}

}  // namespace lft
