#include "lft/disorder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lft/rng.hpp"

namespace lft {
namespace {

double draw(const DisorderSpec& spec, double u) {
  switch (spec.kind) {
    case DisorderKind::uniform:
      return 2.0 * u - 1.0;
    case DisorderKind::two_point:
      return u < 0.5 ? -1.0 : 1.0;
    case DisorderKind::tabulated: {
      // linear interpolation of the inverse CDF table
      const size_t m = spec.quantiles.size();
      const double pos = u * static_cast<double>(m - 1);
      const size_t j = std::min(static_cast<size_t>(pos), m - 2);
      const double a = pos - static_cast<double>(j);
      return (1.0 - a) * spec.quantiles[j] + a * spec.quantiles[j + 1];
    }
  }
  return 0.0;
}

void validate(const DisorderSpec& spec) {
  if (spec.lambda < 0) throw std::invalid_argument("disorder lambda must be >= 0");
  if (spec.kind == DisorderKind::tabulated) {
    if (spec.quantiles.size() < 2) throw std::invalid_argument("tabulated disorder needs >= 2 quantiles");
    for (size_t j = 0; j < spec.quantiles.size(); ++j) {
      if (std::abs(spec.quantiles[j]) > 1.0)
        throw std::invalid_argument("tabulated disorder support must lie in [-1,1]");
      if (j > 0 && spec.quantiles[j] < spec.quantiles[j - 1])
        throw std::invalid_argument("tabulated disorder quantiles must be nondecreasing");
    }
  }
}

}  // namespace

Realization sample_realization(const DisorderSpec& spec, const Box& box, long index) {
  validate(spec);
  if (index < 0) throw std::invalid_argument("realization index must be >= 0");
  Realization r;
  r.master_seed = spec.master_seed;
  r.index = index;
  r.lambda = spec.lambda;
  r.box = box;
  r.values.resize(static_cast<size_t>(box.n));
  for (long i = 0; i < box.n; ++i) {
    const Site x = box.site(i);
    const double u = rng::to_unit(rng::site_counter(spec.master_seed, static_cast<std::uint64_t>(index), x));
    r.values[static_cast<size_t>(i)] = draw(spec, u);
  }
  return r;
}

EnsembleStats ensemble_mean(const std::function<std::vector<double>(const Realization&)>& estimator,
                            const DisorderSpec& spec, const Box& box, long N, Exec ex) {
  if (N < 2) throw std::invalid_argument("ensemble_mean needs N >= 2");
  std::vector<std::vector<double>> samples(static_cast<size_t>(N));
  long failed = -1;
  std::string what;
  parallel_for(
      N,
      [&](long i) {
        try {
          samples[static_cast<size_t>(i)] = estimator(sample_realization(spec, box, i));
        } catch (const std::exception& e) {
#pragma omp critical
          if (failed < 0 || i < failed) {
            failed = i;
            what = e.what();
          }
        }
      },
      ex);
  if (failed >= 0)
    throw std::runtime_error("estimator failed on realization " + std::to_string(failed) + ": " + what);
  const size_t m = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != m) throw std::runtime_error("estimator returned inconsistent sizes");

  auto sum_of = [&](const std::function<double(size_t, size_t)>& term) {
    std::vector<double> acc(m, 0.0);
    return chunked_reduce(
        N, acc,
        [&](long i, std::vector<double>& a) {
          for (size_t c = 0; c < m; ++c) a[c] += term(static_cast<size_t>(i), c);
        },
        [](std::vector<double>& a, const std::vector<double>& b) {
          for (size_t c = 0; c < a.size(); ++c) a[c] += b[c];
        },
        Exec::serial);  // N partials are cheap; keep the fold order trivially fixed
  };
  EnsembleStats out;
  out.n = N;
  out.mean = sum_of([&](size_t i, size_t c) { return samples[i][c]; });
  for (auto& v : out.mean) v /= static_cast<double>(N);
  auto ss = sum_of([&](size_t i, size_t c) {
    const double dlt = samples[i][c] - out.mean[c];
    return dlt * dlt;
  });
  out.stderr_.resize(m);
  for (size_t c = 0; c < m; ++c)
    out.stderr_[c] = std::sqrt(ss[c] / (static_cast<double>(N - 1) * static_cast<double>(N)));
  return out;
}

SelfAveragingTable self_averaging_diagnostic(
    const std::function<double(const Realization&, const Box&)>& observable,
    const DisorderSpec& spec, int d, const std::vector<int>& l_list, long N, Exec ex) {
  if (N < 10) throw std::invalid_argument("self_averaging_diagnostic needs N >= 10");
  for (size_t j = 1; j < l_list.size(); ++j)
    if (l_list[j] <= l_list[j - 1]) throw std::invalid_argument("l_list must increase");
  SelfAveragingTable table;
  for (int l : l_list) {
    const Box box = build_box(d, l);
    auto est = [&](const Realization& r) { return std::vector<double>{observable(r, box)}; };
    const EnsembleStats st = ensemble_mean(est, spec, box, N, ex);
    SelfAveragingRow row;
    row.l = l;
    row.sites = box.n;
    row.mean = st.mean[0];
    // stderr = sqrt(var/N) with the unbiased variance
    row.variance = st.stderr_[0] * st.stderr_[0] * static_cast<double>(N);
    table.rows.push_back(row);
  }
  // least-squares slope of log variance vs log site count
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long cnt = 0;
  for (const auto& row : table.rows) {
    if (row.variance <= 0) continue;
    const double x = std::log(static_cast<double>(row.sites));
    const double y = std::log(row.variance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  table.slope = (cnt >= 2) ? (sxy - sx * sy / cnt) / (sxx - sx * sx / cnt) : 0.0;
  return table;
}

}  // namespace lft
