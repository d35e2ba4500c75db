#include <chrono>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <vector>

#include "lft/disorder.hpp"
#include "lft/geometry.hpp"
#include "lft/onebody.hpp"
#include "lft/reduce.hpp"
#include "lft/transport.hpp"

// Times the current-correlation kernel on one disorder realization with the
// serial and the OpenMP execution policies and checks the results are
// byte-identical.

namespace {

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) lft::set_workers(std::atoi(argv[1]));

  const lft::Box box = lft::build_box(2, 8);
  lft::DisorderSpec spec;
  spec.lambda = 1.0;
  spec.master_seed = 20260815u;
  const lft::Realization rom = lft::sample_realization(spec, box, 0);
  const lft::EigenSystem eig = lft::diagonalize(lft::hamiltonian(box, rom, spec, nullptr, 0.0), box);

  std::vector<double> lags(81);
  for (size_t i = 0; i < lags.size(); ++i) lags[i] = 2.0 * static_cast<double>(i) / 80.0;

  std::vector<lft::RMat> serial, parallel;
  const double ts = timed([&] { serial = lft::xi_p_l(eig, 1.0, 6, lags, lft::Exec::serial); });
  const double tp = timed([&] { parallel = lft::xi_p_l(eig, 1.0, 6, lags, lft::Exec::openmp); });

  bool identical = serial.size() == parallel.size();
  for (size_t i = 0; identical && i < serial.size(); ++i) {
    identical = serial[i].rows() == parallel[i].rows() && serial[i].cols() == parallel[i].cols() &&
                std::memcmp(serial[i].data(), parallel[i].data(),
                            sizeof(double) * static_cast<size_t>(serial[i].size())) == 0;
  }

  std::cout << "sites " << box.n << ", lags " << lags.size() << "\n";
  std::cout << "serial  " << ts << " s\n";
  std::cout << "openmp  " << tp << " s\n";
  std::cout << "speedup " << (tp > 0 ? ts / tp : 0.0) << "x\n";
  std::cout << "identical " << (identical ? "yes" : "no") << "\n";
  return identical ? 0 : 1;
}
