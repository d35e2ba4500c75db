#pragma once
#include <vector>

#include "lft/onebody.hpp"

namespace lft {

// Non-autonomous evolution record: unitaries U_{t,t0} at checkpoint times on
// the padded box, plus the static eigensystem reused by downstream traces.
struct EvolutionRun {
  Box box;
  Realization realization;
  DisorderSpec spec;
  VectorPotential vp;
  double mu = 0;
  double t0 = 0, t_end = 0, dt = 0;
  std::vector<double> times;
  std::vector<Mat> unitaries;
  double drift = 0;  // max over checkpoints of ||U^dagger U - 1||_max
  EigenSystem eig0;  // field-free Hamiltonian on the padded box
};

// Padded half-side so that the light cone emanating from the field window
// never reaches the boundary: l_field * (profile support radius) rounded up,
// plus ceil(6 d (t_end - t0)).
int padded_half_side(int d, double field_scale, ProfileKind profile, double duration);

// Midpoint-exponential stepping U <- exp(-i dt H(t + dt/2)) U. Intervals on
// which A(t,.) is constant are advanced in one exact exponential. Checkpoint
// times are snapped to the step grid.
EvolutionRun evolve(const Box& box, const Realization& realization, const DisorderSpec& spec,
                    const VectorPotential& vp, double t0, double t_end, double dt,
                    const std::vector<double>& checkpoint_times, double mu = 0);

// d_t = U_{t,t0} d0 U_{t,t0}^dagger at a checkpoint.
Mat evolve_symbol(const Mat& d0, const EvolutionRun& run, double t);
long checkpoint_index(const EvolutionRun& run, double t);

}  // namespace lft
