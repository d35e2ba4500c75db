#include "lft/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lft/rng.hpp"

namespace lft {
namespace {

// exp(-1/(1-u^2)) on (-1,1), the standard mollifier profile.
double mollifier(double u) {
  const double s = 1.0 - u * u;
  if (s <= 0) return 0.0;
  return std::exp(-1.0 / s);
}
double mollifier_deriv(double u) {
  const double s = 1.0 - u * u;
  if (s <= 0) return 0.0;
  return mollifier(u) * (-2.0 * u) / (s * s);
}

// 8-node Gauss-Legendre rule mapped to [0,1].
constexpr int gl_n = 8;
constexpr double gl_x[gl_n] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double gl_w[gl_n] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};

int bond_axis(const Site& x, const Site& y) {
  int axis = -1;
  for (int k = 0; k < max_dim; ++k) {
    const int step = y[k] - x[k];
    if (step == 0) continue;
    if (axis >= 0 || std::abs(step) != 1)
      throw std::invalid_argument("bond endpoints must differ by one unit along one axis");
    axis = k;
  }
  if (axis < 0) throw std::invalid_argument("bond endpoints coincide");
  return axis;
}

// int_0^1 psi((x + a*(y-x))/scale) da along a unit bond.
double segment_profile_mean(const VectorPotential& vp, const Site& x, const Site& y) {
  double acc = 0;
  double p[max_dim];
  for (int i = 0; i < gl_n; ++i) {
    const double a = 0.5 * (gl_x[i] + 1.0);
    for (int k = 0; k < vp.d; ++k)
      p[k] = (x[k] + a * (y[k] - x[k]) - vp.center[static_cast<size_t>(k)]) / vp.scale;
    acc += 0.5 * gl_w[i] * vp.profile.value(vp.d, p);
  }
  return acc;
}

}  // namespace

double Pulse::E(double t) const {
  if (t <= t0 || t >= tend) return 0.0;
  if (kind == PulseKind::bump_derivative) {
    const double u = (2.0 * t - t0 - tend) / (tend - t0);
    return mollifier_deriv(u) * 2.0 / (tend - t0);
  }
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const size_t j = static_cast<size_t>(it - ts.begin());
  if (j == 0 || j >= ts.size()) return 0.0;
  const double a = (t - ts[j - 1]) / (ts[j] - ts[j - 1]);
  return (1.0 - a) * vals[j - 1] + a * vals[j];
}

double Pulse::A(double t) const {
  if (t <= t0) return 0.0;
  if (kind == PulseKind::bump_derivative) {
    if (t >= tend) return 0.0;  // primitive is the bump itself
    const double u = (2.0 * t - t0 - tend) / (tend - t0);
    return mollifier(u);
  }
  if (t >= tend) return prim.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const size_t j = static_cast<size_t>(it - ts.begin());
  if (j == 0) return 0.0;
  if (j >= ts.size()) return prim.back();
  const double h = ts[j] - ts[j - 1];
  const double a = (t - ts[j - 1]) / h;
  const double e0 = vals[j - 1], e1 = vals[j];
  // exact integral of the linear interpolant over the partial segment
  return prim[j - 1] + h * (a * e0 + 0.5 * a * a * (e1 - e0));
}

double Pulse::max_abs_A() const {
  if (kind == PulseKind::bump_derivative) return std::exp(-1.0);
  double m = 0;
  for (size_t j = 0; j < ts.size(); ++j) {
    m = std::max(m, std::abs(prim[j]));
    if (j == 0) continue;
    // quadratic primitive may peak inside the segment where E crosses zero
    const double e0 = vals[j - 1], e1 = vals[j];
    if ((e0 > 0) != (e1 > 0) && e0 != e1) {
      const double a = e0 / (e0 - e1);
      if (a > 0 && a < 1) m = std::max(m, std::abs(A(ts[j - 1] + a * (ts[j] - ts[j - 1]))));
    }
  }
  return m;
}

Pulse make_bump_derivative_pulse(double t0, double tend) {
  if (!(tend > t0)) throw std::invalid_argument("pulse support must have tend > t0");
  Pulse p;
  p.kind = PulseKind::bump_derivative;
  p.t0 = t0;
  p.tend = tend;
  p.ac = true;
  return p;
}

Pulse make_tabulated_pulse(std::vector<double> ts, std::vector<double> vals) {
  if (ts.size() != vals.size() || ts.size() < 2)
    throw std::invalid_argument("tabulated pulse needs >= 2 matching nodes");
  for (size_t j = 1; j < ts.size(); ++j)
    if (!(ts[j] > ts[j - 1])) throw std::invalid_argument("tabulated pulse nodes must increase");
  Pulse p;
  p.kind = PulseKind::tabulated;
  p.t0 = ts.front();
  p.tend = ts.back();
  p.ts = std::move(ts);
  p.vals = std::move(vals);
  p.prim.assign(p.ts.size(), 0.0);
  for (size_t j = 1; j < p.ts.size(); ++j)
    p.prim[j] = p.prim[j - 1] + 0.5 * (p.vals[j] + p.vals[j - 1]) * (p.ts[j] - p.ts[j - 1]);
  p.ac = std::abs(p.prim.back()) <= 1e-12;
  return p;
}

Pulse make_halfwave_pulse(double t0, double tend, int nodes) {
  std::vector<double> ts(nodes), vals(nodes);
  const double pi = std::acos(-1.0);
  for (int j = 0; j < nodes; ++j) {
    const double a = static_cast<double>(j) / (nodes - 1);
    ts[j] = t0 + a * (tend - t0);
    vals[j] = std::sin(pi * a) * std::sin(pi * a);
  }
  return make_tabulated_pulse(std::move(ts), std::move(vals));
}

Pulse make_seeded_ac_pulse(double t0, double tend, int nodes, std::uint64_t seed) {
  if (nodes < 4) throw std::invalid_argument("seeded pulse needs >= 4 nodes");
  std::vector<double> ts(nodes), vals(nodes, 0.0), hump(nodes, 0.0);
  const double pi = std::acos(-1.0);
  std::uint64_t state = seed ^ 0x9e3779b97f4a7c15ull;
  for (int j = 0; j < nodes; ++j) {
    const double a = static_cast<double>(j) / (nodes - 1);
    ts[j] = t0 + a * (tend - t0);
    hump[j] = std::sin(pi * a) * std::sin(pi * a);
    if (j > 0 && j + 1 < nodes) {
      state = rng::splitmix64(state);
      vals[j] = 2.0 * rng::to_unit(state) - 1.0;
    }
  }
  // remove the exact trapezoid integral so the primitive ends at zero
  auto integral = [&](const std::vector<double>& v) {
    double s = 0;
    for (int j = 1; j < nodes; ++j) s += 0.5 * (v[j] + v[j - 1]) * (ts[j] - ts[j - 1]);
    return s;
  };
  const double c = integral(vals) / integral(hump);
  for (int j = 0; j < nodes; ++j) vals[j] -= c * hump[j];
  Pulse p = make_tabulated_pulse(std::move(ts), std::move(vals));
  p.prim.back() = 0.0;  // zero by construction up to rounding of c
  p.ac = true;
  return p;
}

double check_ac(const Pulse& pulse) {
  const double tol = 1e-10 * std::max(pulse.max_abs_A(), 1e-300);
  if (std::abs(pulse.A_end()) > tol) return never_ac;
  std::vector<double> grid;
  if (pulse.kind == PulseKind::tabulated) {
    grid = pulse.ts;
  } else {
    grid.resize(4097);
    for (size_t j = 0; j < grid.size(); ++j)
      grid[j] = pulse.t0 + (pulse.tend - pulse.t0) * static_cast<double>(j) / (grid.size() - 1);
  }
  double t1 = pulse.t0;
  for (size_t j = grid.size(); j-- > 0;) {
    if (std::abs(pulse.A(grid[j])) > tol) {
      t1 = (j + 1 < grid.size()) ? grid[j + 1] : pulse.tend;
      break;
    }
  }
  return t1;
}

double SpatialProfile::psi1(double u) const {
  if (kind == ProfileKind::indicator) return (u >= -1.0 && u <= 1.0) ? 1.0 : 0.0;
  return mollifier(2.0 * u) * std::exp(1.0);  // peak value 1 at u = 0, support [-1/2,1/2]
}

double SpatialProfile::value(int d, const double* x) const {
  double v = 1.0;
  for (int k = 0; k < d; ++k) v *= psi1(x[k]);
  return v;
}

double SpatialProfile::psi_sq_integral(int d) const {
  if (kind == ProfileKind::indicator) return std::pow(2.0, d);
  // int_{-1/2}^{1/2} psi1(u)^2 du, 64 panels of the 8-node rule (smooth integrand)
  static const double one_dim = [] {
    SpatialProfile b{ProfileKind::bump};
    double s = 0;
    const int panels = 64;
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double lo = -0.5 + static_cast<double>(pnl) / panels;
      const double h = 1.0 / panels;
      for (int i = 0; i < gl_n; ++i) {
        const double u = lo + 0.5 * h * (gl_x[i] + 1.0);
        s += 0.5 * h * gl_w[i] * b.psi1(u) * b.psi1(u);
      }
    }
    return s;
  }();
  return std::pow(one_dim, d);
}

double VectorPotential::profile_at(const double* x) const {
  double p[max_dim];
  for (int k = 0; k < d; ++k) p[k] = (x[k] - center[static_cast<size_t>(k)]) / scale;
  return profile.value(d, p);
}

std::array<double, 3> VectorPotential::A(double t, const double* x) const {
  const double f = eta * profile_at(x) * pulse.A(t);
  return {f * w[0], f * w[1], f * w[2]};
}

std::array<double, 3> VectorPotential::electric_field(double t, const double* x) const {
  const double f = -eta * profile_at(x) * pulse.E(t);
  return {f * w[0], f * w[1], f * w[2]};
}

bool VectorPotential::A_or_E_nonzero(double t) const {
  return pulse.A(t) != 0.0 || pulse.E(t) != 0.0;
}

VectorPotential make_vector_potential(Pulse pulse, SpatialProfile profile, int d,
                                      std::array<double, 3> w, double scale, double eta) {
  if (d < 1 || d > max_dim) throw std::invalid_argument("field dimension must be 1..3");
  if (!(scale > 0)) throw std::invalid_argument("field scale must be positive");
  VectorPotential vp;
  vp.pulse = std::move(pulse);
  vp.profile = profile;
  vp.d = d;
  vp.w = w;
  vp.scale = scale;
  vp.eta = eta;
  const double t1 = check_ac(vp.pulse);
  vp.t1 = std::isfinite(t1) ? t1 : vp.pulse.tend;
  return vp;
}

double line_integral_A(const VectorPotential& vp, double t, const Site& from, const Site& to) {
  const int k = bond_axis(from, to);
  if (vp.eta == 0) return 0.0;
  const double step = to[k] - from[k];
  return vp.eta * vp.w[k] * step * vp.pulse.A(t) * segment_profile_mean(vp, from, to);
}

double integrated_bond_field(const VectorPotential& vp, double t, const Site& x1, const Site& x2) {
  const int k = bond_axis(x1, x2);
  if (vp.eta == 0) return 0.0;
  const double step = x2[k] - x1[k];
  return -vp.eta * vp.w[k] * step * vp.pulse.E(t) * segment_profile_mean(vp, x1, x2);
}

std::complex<double> peierls_phase(const VectorPotential& vp, double t, const Site& x, const Site& y) {
  const double phi = line_integral_A(vp, t, x, y);
  return std::complex<double>(std::cos(phi), std::sin(phi));
}

}  // namespace lft
