#pragma once
#include <string>
#include <vector>

#include "lft/config.hpp"
#include "lft/reduce.hpp"

namespace lft {

// Executes one configured scenario: writes the resolved config echo,
// per-realization and ensemble CSVs, and summary.json into cfg.out_dir.
// pass reflects the scenario's own acceptance metrics.
struct ScenarioResult {
  bool pass = false;
  std::string summary_json;
  std::vector<std::string> files;  // paths written, relative to out_dir
};

ScenarioResult run_scenario(const RunConfig& cfg, Exec ex = Exec::openmp);

}  // namespace lft
