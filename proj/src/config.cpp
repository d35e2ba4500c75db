#include "lft/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lft {
namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("config parse error, line " + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Removes a trailing # comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') return false;
  return true;
}

TomlValue parse_scalar(const std::string& tok, int line) {
  TomlValue v;
  if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
    v.kind = TomlValue::Kind::string;
    v.str = tok.substr(1, tok.size() - 2);
    if (v.str.find('"') != std::string::npos) parse_fail(line, "nested quote in string");
    return v;
  }
  if (tok == "true" || tok == "false") {
    v.kind = TomlValue::Kind::boolean;
    v.b = (tok == "true");
    return v;
  }
  try {
    std::size_t used = 0;
    v.num = std::stod(tok, &used);
    if (used != tok.size()) parse_fail(line, "trailing characters in number '" + tok + "'");
  } catch (const std::invalid_argument&) {
    parse_fail(line, "unrecognized value '" + tok + "'");
  } catch (const std::out_of_range&) {
    parse_fail(line, "number out of range '" + tok + "'");
  }
  v.kind = TomlValue::Kind::number;
  return v;
}

TomlValue parse_array(const std::string& body, int line) {
  TomlValue v;
  v.kind = TomlValue::Kind::num_array;
  std::vector<std::string> toks;
  std::string cur;
  bool in_str = false;
  for (char c : body) {
    if (c == '"') in_str = !in_str;
    if (c == ',' && !in_str) {
      toks.push_back(strip(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_str) parse_fail(line, "unterminated string in array");
  cur = strip(cur);
  if (!cur.empty()) toks.push_back(cur);  // tolerate one trailing comma
  bool any_str = false, any_num = false;
  for (const std::string& t : toks) {
    if (t.empty()) parse_fail(line, "empty array element");
    TomlValue e = parse_scalar(t, line);
    if (e.kind == TomlValue::Kind::string) {
      any_str = true;
      v.strs.push_back(e.str);
    } else if (e.kind == TomlValue::Kind::number) {
      any_num = true;
      v.nums.push_back(e.num);
    } else {
      parse_fail(line, "arrays may hold numbers or strings only");
    }
  }
  if (any_str && any_num) parse_fail(line, "mixed array element types");
  if (any_str) v.kind = TomlValue::Kind::str_array;
  return v;
}

}  // namespace

TomlTable parse_toml(const std::string& text) {
  TomlTable out;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = strip(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') parse_fail(line, "unterminated section header");
      section = strip(s.substr(1, s.size() - 2));
      if (!valid_key(section)) parse_fail(line, "invalid section name '" + section + "'");
      continue;
    }
    std::size_t eq = std::string::npos;
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') in_str = !in_str;
      if (s[i] == '=' && !in_str) {
        eq = i;
        break;
      }
    }
    if (eq == std::string::npos) parse_fail(line, "expected key = value");
    std::string key = strip(s.substr(0, eq));
    std::string val = strip(s.substr(eq + 1));
    if (!valid_key(key)) parse_fail(line, "invalid key '" + key + "'");
    if (val.empty()) parse_fail(line, "missing value for '" + key + "'");
    std::string path = section.empty() ? key : section + "." + key;
    if (out.count(path)) parse_fail(line, "duplicate key '" + path + "'");
    if (val.front() == '[') {
      if (val.back() != ']') parse_fail(line, "unterminated array");
      out[path] = parse_array(val.substr(1, val.size() - 2), line);
    } else {
      out[path] = parse_scalar(val, line);
    }
  }
  return out;
}

TomlTable parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::transport: return "transport";
    case Scenario::ohm: return "ohm";
    case Scenario::joule: return "joule";
    case Scenario::greenkubo: return "greenkubo";
    case Scenario::acmeasure: return "acmeasure";
    case Scenario::ergodic: return "ergodic";
    case Scenario::decay: return "decay";
  }
  return "?";
}

DisorderSpec RunConfig::disorder() const {
  DisorderSpec spec;
  spec.kind = distribution;
  spec.lambda = lambda;
  spec.master_seed = master_seed;
  spec.quantiles = quantiles;
  return spec;
}

Pulse RunConfig::make_pulse() const {
  if (pulse == "bump_derivative") return make_bump_derivative_pulse(pulse_t0, pulse_tend);
  if (pulse == "halfwave") return make_halfwave_pulse(pulse_t0, pulse_tend, pulse_nodes);
  if (pulse == "seeded_ac")
    return make_seeded_ac_pulse(pulse_t0, pulse_tend, pulse_nodes, pulse_seed);
  if (pulse == "tabulated") return make_tabulated_pulse(pulse_ts, pulse_vals);
  throw std::invalid_argument("unknown pulse kind: " + pulse);
}

std::vector<double> RunConfig::tgrid() const {
  std::vector<double> t(static_cast<std::size_t>(n_times));
  const double h = (t_max - pulse_t0) / static_cast<double>(n_times - 1);
  for (long i = 0; i < n_times; ++i) t[static_cast<std::size_t>(i)] = pulse_t0 + h * static_cast<double>(i);
  t.back() = t_max;
  return t;
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario_name(scenario);
  j["model"] = {{"d", d},
                {"l_list", l_list},
                {"lambda", lambda},
                {"beta", beta},
                {"distribution", distribution == DisorderKind::uniform      ? "uniform"
                                 : distribution == DisorderKind::two_point ? "two_point"
                                                                           : "tabulated"},
                {"quantiles", quantiles},
                {"master_seed", master_seed},
                {"N", n_realizations},
                {"mu", mu}};
  j["field"] = {{"pulse", pulse},
                {"t0", pulse_t0},
                {"tend", pulse_tend},
                {"pulse_nodes", pulse_nodes},
                {"pulse_seed", pulse_seed},
                {"pulse_ts", pulse_ts},
                {"pulse_vals", pulse_vals},
                {"profile", profile == ProfileKind::indicator ? "indicator" : "bump"},
                {"direction", direction},
                {"eta_list", eta_list}};
  j["numerics"] = {{"dt", dt},
                   {"t_max", t_max},
                   {"n_times", n_times},
                   {"bin_width", bin_width},
                   {"margin", margin}};
  j["output"] = {{"directory", out_dir}};
  return j.dump(2) + "\n";
}

namespace {

struct Checker {
  const TomlTable& t;
  ValidationResult* res;
  std::set<std::string> seen;

  const TomlValue* get(const std::string& path, TomlValue::Kind want, const char* kind_name) {
    auto it = t.find(path);
    if (it == t.end()) return nullptr;
    seen.insert(path);
    if (it->second.kind != want) {
      res->errors.push_back({path, std::string("expected ") + kind_name});
      return nullptr;
    }
    return &it->second;
  }

  void number(const std::string& path, double* slot) {
    if (const TomlValue* v = get(path, TomlValue::Kind::number, "a number")) *slot = v->num;
  }
  void integer(const std::string& path, long* slot) {
    if (const TomlValue* v = get(path, TomlValue::Kind::number, "an integer")) {
      if (v->num != std::floor(v->num)) {
        res->errors.push_back({path, "expected an integer"});
        return;
      }
      *slot = static_cast<long>(v->num);
    }
  }
  void uint_seed(const std::string& path, std::uint64_t* slot) {
    if (const TomlValue* v = get(path, TomlValue::Kind::number, "an integer")) {
      if (v->num != std::floor(v->num) || v->num < 0) {
        res->errors.push_back({path, "expected a nonnegative integer"});
        return;
      }
      *slot = static_cast<std::uint64_t>(v->num);
    }
  }
  void text(const std::string& path, std::string* slot) {
    if (const TomlValue* v = get(path, TomlValue::Kind::string, "a string")) *slot = v->str;
  }
  void num_list(const std::string& path, std::vector<double>* slot) {
    if (const TomlValue* v = get(path, TomlValue::Kind::num_array, "an array of numbers"))
      *slot = v->nums;
  }
  void int_list(const std::string& path, std::vector<int>* slot) {
    if (const TomlValue* v = get(path, TomlValue::Kind::num_array, "an array of integers")) {
      std::vector<int> out;
      for (double x : v->nums) {
        if (x != std::floor(x)) {
          res->errors.push_back({path, "expected integers"});
          return;
        }
        out.push_back(static_cast<int>(x));
      }
      *slot = out;
    }
  }

  void small_int(const std::string& path, int* slot) {
    long v = *slot;
    integer(path, &v);
    *slot = static_cast<int>(v);
  }
  void error(const std::string& path, const std::string& msg) { res->errors.push_back({path, msg}); }
};

}  // namespace

ValidationResult validate_config(const TomlTable& table) {
  ValidationResult res;
  RunConfig& c = res.config;
  Checker ck{table, &res, {}};

  std::string scenario = "transport", distribution = "uniform", profile = "indicator";
  ck.text("scenario", &scenario);

  ck.small_int("model.d", &c.d);
  ck.int_list("model.l_list", &c.l_list);
  ck.number("model.lambda", &c.lambda);
  ck.number("model.beta", &c.beta);
  ck.text("model.distribution", &distribution);
  ck.num_list("model.quantiles", &c.quantiles);
  ck.uint_seed("model.master_seed", &c.master_seed);
  ck.integer("model.N", &c.n_realizations);
  ck.number("model.mu", &c.mu);

  ck.text("field.pulse", &c.pulse);
  ck.number("field.t0", &c.pulse_t0);
  ck.number("field.tend", &c.pulse_tend);
  ck.integer("field.pulse_nodes", &c.pulse_nodes);
  ck.uint_seed("field.pulse_seed", &c.pulse_seed);
  ck.num_list("field.pulse_ts", &c.pulse_ts);
  ck.num_list("field.pulse_vals", &c.pulse_vals);
  ck.text("field.profile", &profile);
  ck.small_int("field.direction", &c.direction);
  ck.num_list("field.eta_list", &c.eta_list);

  ck.number("numerics.dt", &c.dt);
  ck.number("numerics.t_max", &c.t_max);
  ck.integer("numerics.n_times", &c.n_times);
  ck.number("numerics.bin_width", &c.bin_width);
  ck.small_int("numerics.margin", &c.margin);

  ck.text("output.directory", &c.out_dir);

  for (const auto& [path, value] : table) {
    (void)value;
    if (!ck.seen.count(path)) ck.error(path, "unknown key");
  }

  if (scenario == "transport") c.scenario = Scenario::transport;
  else if (scenario == "ohm") c.scenario = Scenario::ohm;
  else if (scenario == "joule") c.scenario = Scenario::joule;
  else if (scenario == "greenkubo") c.scenario = Scenario::greenkubo;
  else if (scenario == "acmeasure") c.scenario = Scenario::acmeasure;
  else if (scenario == "ergodic") c.scenario = Scenario::ergodic;
  else if (scenario == "decay") c.scenario = Scenario::decay;
  else ck.error("scenario", "unknown scenario '" + scenario + "'");

  if (distribution == "uniform") c.distribution = DisorderKind::uniform;
  else if (distribution == "two_point") c.distribution = DisorderKind::two_point;
  else if (distribution == "tabulated") c.distribution = DisorderKind::tabulated;
  else ck.error("model.distribution", "unknown distribution '" + distribution + "'");

  if (profile == "indicator") c.profile = ProfileKind::indicator;
  else if (profile == "bump") c.profile = ProfileKind::bump;
  else ck.error("field.profile", "unknown profile '" + profile + "'");

  if (c.d < 1 || c.d > 3) ck.error("model.d", "dimension must be 1, 2, or 3");
  if (c.l_list.empty()) ck.error("model.l_list", "at least one window half-side required");
  for (std::size_t i = 0; i < c.l_list.size(); ++i) {
    if (c.l_list[i] < 1) {
      ck.error("model.l_list", "half-sides must be >= 1");
      break;
    }
    if (i && c.l_list[i] <= c.l_list[i - 1]) {
      ck.error("model.l_list", "half-sides must be strictly increasing");
      break;
    }
  }
  if (!(c.lambda >= 0)) ck.error("model.lambda", "coupling must be >= 0");
  if (!(c.beta > 0)) ck.error("model.beta", "inverse temperature must be > 0");
  if (c.n_realizations < 1) ck.error("model.N", "need at least one realization");
  if (c.distribution == DisorderKind::tabulated) {
    if (c.quantiles.empty()) ck.error("model.quantiles", "tabulated distribution needs quantiles");
    for (std::size_t i = 0; i < c.quantiles.size(); ++i) {
      if (c.quantiles[i] < -1 || c.quantiles[i] > 1) {
        ck.error("model.quantiles", "quantile values must lie in [-1, 1]");
        break;
      }
      if (i && c.quantiles[i] < c.quantiles[i - 1]) {
        ck.error("model.quantiles", "quantiles must be nondecreasing");
        break;
      }
    }
  } else if (!c.quantiles.empty()) {
    res.warnings.push_back("model.quantiles ignored for distribution '" + distribution + "'");
  }

  if (c.pulse != "bump_derivative" && c.pulse != "halfwave" && c.pulse != "seeded_ac" &&
      c.pulse != "tabulated")
    ck.error("field.pulse", "unknown pulse kind '" + c.pulse + "'");
  if (!(c.pulse_t0 < c.pulse_tend)) ck.error("field.tend", "pulse must end after it starts");
  if (c.pulse_nodes < 2) ck.error("field.pulse_nodes", "need at least two pulse nodes");
  if (c.pulse == "tabulated") {
    if (c.pulse_ts.size() < 2 || c.pulse_ts.size() != c.pulse_vals.size())
      ck.error("field.pulse_ts", "tabulated pulse needs matching ts/vals with >= 2 nodes");
    for (std::size_t i = 1; i < c.pulse_ts.size(); ++i)
      if (c.pulse_ts[i] <= c.pulse_ts[i - 1]) {
        ck.error("field.pulse_ts", "pulse times must be strictly increasing");
        break;
      }
  }
  if (c.direction < 0 || c.direction >= c.d)
    ck.error("field.direction", "direction must lie in [0, d)");
  if (c.eta_list.empty()) ck.error("field.eta_list", "at least one field strength required");
  int nonzero_etas = 0;
  for (double e : c.eta_list) nonzero_etas += (e != 0);
  if (nonzero_etas < 2 && (c.scenario == Scenario::ohm || c.scenario == Scenario::joule))
    ck.error("field.eta_list",
             "degenerate input: response scenarios need at least two nonzero field strengths "
             "to fit a slope");
  for (std::size_t i = 1; i < c.eta_list.size(); ++i)
    if (std::abs(c.eta_list[i]) >= std::abs(c.eta_list[i - 1])) {
      ck.error("field.eta_list", "field strengths must be strictly decreasing in magnitude");
      break;
    }

  if (!(c.dt > 0)) ck.error("numerics.dt", "step size must be > 0");
  if (!(c.t_max > c.pulse_t0)) ck.error("numerics.t_max", "t_max must exceed the pulse start");
  if (c.n_times < 2) ck.error("numerics.n_times", "need at least two report times");
  if (!(c.bin_width >= 0)) ck.error("numerics.bin_width", "bin width must be >= 0");
  if (c.margin < 1) ck.error("numerics.margin", "ambient margin must be >= 1");
  if (c.out_dir.empty()) ck.error("output.directory", "output directory must be nonempty");

  if (res.errors.empty() && c.dt * 4.0 * c.d * (2.0 + c.lambda) > 0.5)
    res.warnings.push_back(
        "numerics.dt: step size is coarse for this bandwidth (dt * 4d * (2 + lambda) > 0.5); "
        "expect visible time-discretization error");

  if (res.errors.empty()) {
    const double step = (c.t_max - c.pulse_t0) / static_cast<double>(c.n_times - 1);
    const double ratio = step / c.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6)
      res.warnings.push_back(
          "numerics.n_times: report times are not multiples of dt and will snap to the step "
          "grid");
  }

  if (res.errors.empty() && c.scenario != Scenario::decay && c.n_realizations < 2 &&
      (c.scenario == Scenario::transport || c.scenario == Scenario::ergodic ||
       c.scenario == Scenario::acmeasure))
    res.warnings.push_back("model.N: ensemble statistics with a single realization have no spread");

  return res;
}

RunConfig resolve_config(const TomlTable& table, std::vector<std::string>* warnings) {
  ValidationResult res = validate_config(table);
  if (warnings) *warnings = res.warnings;
  if (!res.errors.empty()) {
    std::string msg = "invalid config:";
    for (const Diagnostic& e : res.errors) msg += "\n  " + e.path + ": " + e.message;
    throw std::invalid_argument(msg);
  }
  return res.config;
}

}  // namespace lft
