#pragma once
#include <cstdint>
#include <vector>

#include "lft/field.hpp"
#include "lft/transport.hpp"

namespace lft {

// Discrete frequency measure of the in-phase response in one direction.
// Raw atoms (one per nondegenerate eigenpair, both orientations, ensemble
// averaged) are kept exactly because the cosine reconstruction and the dual
// form need the true frequencies; the bins are an export/plotting view.
struct SpectralAtom {
  double nu = 0;
  double weight = 0;
};
struct SpectralMeasure {
  std::vector<double> bin_edges;    // symmetric around 0, ascending
  std::vector<double> bin_weights;  // clipped to >= 0 after the sign check
  std::vector<SpectralAtom> atoms;
  bool zero_excluded = true;
  double min_raw_weight = 0;        // most negative raw weight before clipping
  double calibration_residual = 0;  // internal cosine-reconstruction check
  int direction = 0;
  int l = 0;
  double beta = 0;
  long n = 0;  // realizations averaged
};

// Weights (f_n - f_m)/(eps_m - eps_n) |<m|J_k|n>|^2 / |window| per ordered
// eigenpair. The construction self-validates: the cosine reconstruction must
// match the direct kernel of the same eigensystems on an internal grid, else
// a calibration error is thrown. bin_width <= 0 selects (spectral width)/400.
SpectralMeasure spectral_measure(const std::vector<EigenSystem>& ensemble, double beta, int l,
                                 int direction, double bin_width = 0, Exec ex = Exec::openmp);

// Cosine reconstruction sum_atoms w (cos(nu t) - 1) on a time grid.
std::vector<double> reconstruct_xi(const SpectralMeasure& measure,
                                   const std::vector<double>& tgrid, Exec ex = Exec::openmp);

// Quadratic-form identity for a compensated pulse: the double time integral
// of the kernel against the pulse versus the frequency integral of the
// measure against |pulse transform|^2.
struct AcFormCheck {
  double lhs = 0;
  double rhs = 0;
  double rel_gap = 0;    // |lhs - rhs| / max(|lhs|, 1e-12)
  bool positive = false; // lhs >= -1e-8
};
AcFormCheck ac_form_check(const SpectralMeasure& measure, const TransportKernel& kernel,
                          int direction, const Pulse& pulse, const std::vector<double>& tgrid,
                          Exec ex = Exec::openmp);

}  // namespace lft
