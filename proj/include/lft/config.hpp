#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lft/disorder.hpp"
#include "lft/field.hpp"

namespace lft {

// Minimal TOML subset: [section] / [section.sub] headers, `key = value`
// lines, # comments. Values: strings, booleans, numbers, homogeneous arrays
// of numbers or strings. Flattened into dotted paths ("model.beta").
struct TomlValue {
  enum class Kind { boolean, number, string, num_array, str_array };
  Kind kind = Kind::number;
  bool b = false;
  double num = 0;
  std::string str;
  std::vector<double> nums;
  std::vector<std::string> strs;
};
using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string& text);       // throws on syntax errors
TomlTable parse_toml_file(const std::string& path);  // throws when unreadable

enum class Scenario { transport, ohm, joule, greenkubo, acmeasure, ergodic, decay };
const char* scenario_name(Scenario s);

// Fully-resolved run configuration; every field has a default.
struct RunConfig {
  Scenario scenario = Scenario::transport;

  // model
  int d = 1;
  std::vector<int> l_list = {4, 6};
  double lambda = 1.0;
  double beta = 1.0;
  DisorderKind distribution = DisorderKind::uniform;
  std::vector<double> quantiles;
  std::uint64_t master_seed = 1;
  long n_realizations = 8;
  double mu = 0.0;

  // field
  std::string pulse = "bump_derivative";  // bump_derivative | halfwave | seeded_ac | tabulated
  double pulse_t0 = 0.0;
  double pulse_tend = 1.0;
  long pulse_nodes = 257;
  std::uint64_t pulse_seed = 7;
  std::vector<double> pulse_ts, pulse_vals;
  ProfileKind profile = ProfileKind::indicator;
  int direction = 0;
  std::vector<double> eta_list = {1e-1, 1e-2, 1e-3};

  // numerics
  double dt = 0.02;
  double t_max = 2.0;
  long n_times = 81;
  double bin_width = 0.0;
  int margin = 2;

  // output
  std::string out_dir = "out";

  DisorderSpec disorder() const;
  Pulse make_pulse() const;
  std::vector<double> tgrid() const;  // n_times points from pulse_t0 to t_max
  std::string to_json() const;        // resolved echo with defaults applied
};

struct Diagnostic {
  std::string path;
  std::string message;
};
struct ValidationResult {
  std::vector<Diagnostic> errors;
  std::vector<std::string> warnings;
  RunConfig config;  // resolved; meaningful when errors is empty
};

// Schema check only; applies defaults, flags unknown keys and out-of-range
// values with their dotted paths, and emits the step-size policy warning.
ValidationResult validate_config(const TomlTable& table);

// validate_config + throw listing every error when invalid.
RunConfig resolve_config(const TomlTable& table, std::vector<std::string>* warnings = nullptr);

}  // namespace lft
