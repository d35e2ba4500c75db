#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "lft/geometry.hpp"
#include "lft/reduce.hpp"

namespace lft {

// i.i.d. on-site potential: distribution law, coupling strength, master seed.
enum class DisorderKind { uniform, two_point, tabulated };

struct DisorderSpec {
  DisorderKind kind = DisorderKind::uniform;
  double lambda = 0;
  std::uint64_t master_seed = 1;
  // inverse CDF sampled at equispaced probabilities in [0,1] (tabulated kind),
  // values within [-1,1] and nondecreasing
  std::vector<double> quantiles;
};

struct Realization {
  std::uint64_t master_seed = 0;
  long index = 0;
  double lambda = 0;
  Box box;
  std::vector<double> values;  // per site, box indexing

  double at(const Site& x) const { return values[static_cast<size_t>(box.index(x))]; }
};

// Deterministic draw: value at site x is a pure hash of (seed, index, x),
// so enlarging the box extends a realization without reshuffling it.
Realization sample_realization(const DisorderSpec& spec, const Box& box, long index);

// Componentwise Monte Carlo mean and standard error over realizations
// 0..N-1. The reduction is pairwise in realization order, so the result is
// independent of the worker count.
struct EnsembleStats {
  std::vector<double> mean;
  std::vector<double> stderr_;
  long n = 0;
};
EnsembleStats ensemble_mean(const std::function<std::vector<double>(const Realization&)>& estimator,
                            const DisorderSpec& spec, const Box& box, long N,
                            Exec ex = Exec::openmp);

// Variance of a spatially averaged observable across realizations, per box
// size, plus the log-log slope of variance against site count.
struct SelfAveragingRow {
  int l = 0;
  long sites = 0;
  double mean = 0;
  double variance = 0;
};
struct SelfAveragingTable {
  std::vector<SelfAveragingRow> rows;
  double slope = 0;  // d log(variance) / d log(sites), least squares
};
SelfAveragingTable self_averaging_diagnostic(
    const std::function<double(const Realization&, const Box&)>& observable,
    const DisorderSpec& spec, int d, const std::vector<int>& l_list, long N,
    Exec ex = Exec::openmp);

}  // namespace lft
