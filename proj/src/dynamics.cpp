#include "lft/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace lft {
namespace {

// one exact exponential of a frozen Hamiltonian: U <- exp(-i dt h) U
void apply_exponential(const EigenSystem& eig, double dt, Mat& U) {
  Eigen::VectorXcd ph(eig.eps.size());
  for (long i = 0; i < eig.eps.size(); ++i) ph[i] = std::exp(cx(0, -dt * eig.eps[i]));
  U = eig.V * (ph.asDiagonal() * (eig.V.adjoint() * U));
}

}  // namespace

int padded_half_side(int d, double field_scale, ProfileKind profile, double duration) {
  const double supp = (profile == ProfileKind::indicator) ? 1.0 : 0.5;
  return static_cast<int>(std::ceil(field_scale * supp)) +
         static_cast<int>(std::ceil(6.0 * d * std::max(0.0, duration)));
}

EvolutionRun evolve(const Box& box, const Realization& realization, const DisorderSpec& spec,
                    const VectorPotential& vp, double t0, double t_end, double dt,
                    const std::vector<double>& checkpoint_times, double mu) {
  if (!(t_end >= t0)) throw std::invalid_argument("evolve requires t_end >= t0");
  if (!(dt > 0)) throw std::invalid_argument("evolve requires dt > 0");

  EvolutionRun run;
  run.box = box;
  run.realization = realization;
  run.spec = spec;
  run.vp = vp;
  run.mu = mu;
  run.t0 = t0;
  run.t_end = t_end;
  run.dt = dt;
  run.eig0 = diagonalize(hamiltonian(box, realization, spec, nullptr, t0, mu), box,
                         default_diag_cap);

  const long nsteps = std::max<long>(0, static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9)));
  auto grid_time = [&](long k) { return (k == nsteps) ? t_end : t0 + static_cast<double>(k) * dt; };

  // snap checkpoints to grid indices
  std::set<long> marks{0};
  for (double t : checkpoint_times) {
    long k = std::lround((t - t0) / dt);
    k = std::max<long>(0, std::min(nsteps, k));
    marks.insert(k);
  }

  // frozen-phase eigensystem for constant A != 0 after a non-AC pulse
  EigenSystem eig_frozen;
  bool have_frozen = false;

  Mat U = Mat::Identity(box.n, box.n);
  long k = 0;
  auto record = [&](long idx) {
    run.times.push_back(grid_time(idx));
    run.unitaries.push_back(U);
    const double dev = (U.adjoint() * U - Mat::Identity(box.n, box.n)).cwiseAbs().maxCoeff();
    run.drift = std::max(run.drift, dev);
    if (run.drift > 1e-6)
      throw std::runtime_error("evolution drift " + std::to_string(run.drift) +
                               " at t = " + std::to_string(grid_time(idx)) +
                               " exceeds 1e-6 (dt too large or box too small)");
  };
  record(0);

  const bool field = vp.eta != 0;
  const double p0 = vp.pulse.t0, p1 = vp.pulse.tend;
  while (k < nsteps) {
    const auto it = marks.upper_bound(k);
    const long next_mark = (it == marks.end()) ? nsteps : std::min(*it, nsteps);
    const double ta = grid_time(k);
    // A(t,.) is constant outside the open pulse support: advance exactly
    const EigenSystem* frozen = nullptr;
    long target = next_mark;
    if (!field || ta >= p1 - 1e-12) {
      if (!field || vp.pulse.A(ta) == 0.0) {
        frozen = &run.eig0;
      } else {
        if (!have_frozen) {
          eig_frozen = diagonalize(hamiltonian(box, realization, spec, &vp, ta, mu), box,
                                   default_diag_cap);
          have_frozen = true;
        }
        frozen = &eig_frozen;
      }
    } else if (grid_time(k + 1) <= p0 + 1e-12) {
      target = k + 1;
      while (target < next_mark && grid_time(target + 1) <= p0 + 1e-12) ++target;
      frozen = &run.eig0;
    }
    if (frozen) {
      apply_exponential(*frozen, grid_time(target) - ta, U);
      k = target;
    } else {
      const double tb = grid_time(k + 1);
      const double tm = 0.5 * (ta + tb);
      if (vp.pulse.A(tm) == 0.0 && vp.pulse.E(tm) == 0.0) {
        apply_exponential(run.eig0, tb - ta, U);
      } else {
        const EigenSystem em =
            diagonalize(hamiltonian(box, realization, spec, &vp, tm, mu), box, default_diag_cap);
        apply_exponential(em, tb - ta, U);
      }
      ++k;
    }
    if (marks.count(k)) record(k);
  }
  return run;
}

long checkpoint_index(const EvolutionRun& run, double t) {
  for (size_t i = 0; i < run.times.size(); ++i)
    if (std::abs(run.times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t))) return static_cast<long>(i);
  throw std::invalid_argument("time " + std::to_string(t) + " is not an evolution checkpoint");
}

Mat evolve_symbol(const Mat& d0, const EvolutionRun& run, double t) {
  const long i = checkpoint_index(run, t);
  const Mat& U = run.unitaries[static_cast<size_t>(i)];
  return U * d0 * U.adjoint();
}

}  // namespace lft
