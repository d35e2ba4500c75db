#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "lft/reduce.hpp"

namespace lft {

// One verification criterion of the built-in battery: a structural or
// quantitative property of the simulator checked at fixed, small volumes.
struct CriterionResult {
  int index = 0;
  std::string name;
  bool pass = false;
  std::string details;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
};

// Runs the full battery, streaming one "PASS/FAIL" line per criterion to
// `progress`. Deterministic: fixed seeds, grids and volumes throughout.
AcceptanceReport run_acceptance(std::ostream& progress, Exec ex = Exec::openmp);

}  // namespace lft
