#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "lft/acceptance.hpp"
#include "lft/config.hpp"
#include "lft/reduce.hpp"
#include "lft/scenarios.hpp"

namespace {

int cmd_run(const std::string& path, long long seed, int workers, const std::string& out) {
  std::vector<std::string> warnings;
  lft::TomlTable table = lft::parse_toml_file(path);
  lft::RunConfig cfg = lft::resolve_config(table, &warnings);
  if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
  if (!out.empty()) cfg.out_dir = out;
  if (workers > 0) lft::set_workers(workers);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << cfg.to_json();
  const lft::ScenarioResult res = lft::run_scenario(cfg);
  std::cout << res.summary_json;
  for (const std::string& f : res.files) std::cerr << "wrote " << cfg.out_dir << "/" << f << "\n";
  return res.pass ? 0 : 1;
}

int cmd_validate(const std::string& path) {
  const lft::TomlTable table = lft::parse_toml_file(path);
  const lft::ValidationResult res = lft::validate_config(table);
  for (const std::string& w : res.warnings) std::cout << "warning: " << w << "\n";
  for (const lft::Diagnostic& e : res.errors) std::cout << "error: " << e.path << ": " << e.message << "\n";
  if (!res.errors.empty()) return 1;
  std::cout << "config ok\n" << res.config.to_json();
  return 0;
}

int cmd_suite(int workers) {
  if (workers > 0) lft::set_workers(workers);
  const lft::AcceptanceReport rep = lft::run_acceptance(std::cout);
  return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice fermion transport simulator"};
  app.require_subcommand(1);

  std::string run_config, validate_config_path, out_override;
  long long seed_override = -1;
  int workers = 0;

  CLI::App* run = app.add_subcommand("run", "execute a scenario from a TOML config");
  run->add_option("config", run_config, "path to TOML config")->required();
  run->add_option("--seed", seed_override, "override model.master_seed");
  run->add_option("--workers", workers, "worker thread count (0 = library default)");
  run->add_option("--out", out_override, "override output.out_dir");

  CLI::App* validate = app.add_subcommand("validate", "check a TOML config without running");
  validate->add_option("config", validate_config_path, "path to TOML config")->required();

  CLI::App* suite = app.add_subcommand("suite", "run the built-in verification battery");
  suite->add_option("--workers", workers, "worker thread count (0 = library default)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_config, seed_override, workers, out_override);
    if (validate->parsed()) return cmd_validate(validate_config_path);
    if (suite->parsed()) return cmd_suite(workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
