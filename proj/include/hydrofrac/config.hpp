#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hydrofrac/error.hpp"
#include "hydrofrac/grid.hpp"

namespace hydrofrac {

enum class DtPolicy { fixed, cfl };
enum class AdvectionForm { convective, skew, conservative };

inline const char* to_string(AdvectionForm f) {
  switch (f) {
    case AdvectionForm::convective: return "convective";
    case AdvectionForm::skew: return "skew";
    case AdvectionForm::conservative: return "conservative";
  }
  return "?";
}

/// Initial-data preset. Every preset is projected onto the zero-vertical-mean
/// space after sampling.
///
///   zero
///   single_mode(k, profile[, amplitude])   amplitude * cos(2 pi k x) * profile(z)
///   shear(amplitude, profile)              sheared profile with max|omega_0| = amplitude
///   random_band(k_max, z_modes, amplitude[, seed])
///
/// Profiles: linear (z - 1/2), quadratic (z^2 - 1/3), cos<m> (cos m pi z),
/// sin<m> (sin 2 m pi z), tanh (tanh((z - 1/2)/0.1)).
struct Preset {
  enum class Kind { zero, single_mode, shear, random_band };
  Kind kind = Kind::zero;
  long k = 1;
  std::string profile = "linear";
  double amplitude = 1.0;
  long k_max = 4;
  long z_modes = 2;
  std::optional<std::uint64_t> seed;

  std::string describe() const;
};

struct SimConfig {
  double alpha = 0.0;
  double nu = 0.0;
  std::size_t n_x = 0;
  std::size_t n_z = 0;
  double t_end = 0.0;
  Preset initial_data;

  DtPolicy dt_policy = DtPolicy::cfl;
  double dt = 1e-3;          // fixed policy
  double cfl_safety = 0.5;   // cfl policy
  double dt_max = 1e-2;      // cfl policy cap

  bool nonlinear = true;
  AdvectionForm advection = AdvectionForm::conservative;
  std::vector<std::string> monitors{"energy_budget", "max_principle", "h_preservation", "bkm"};
  std::optional<double> delta;  // X/Y exponents; default delta_** and rho^*
  std::optional<double> rho;
  std::size_t output_every = 1;
  std::vector<double> checkpoint_times;
  std::uint64_t seed = 0;

  double max_principle_tol = 1e-6;
  double budget_tol = 1e-6;
  double blowup_factor = 1e6;

  Grid grid() const { return Grid(n_x, n_z); }
  void validate() const;
};

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError(key, "expected a real number, got '" + v + "'");
  return out;
}

inline long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

inline std::size_t to_size(const std::string& key, const std::string& v) {
  const long n = to_long(key, v);
  if (n < 0) throw ConfigError(key, "must be non-negative");
  return static_cast<std::size_t>(n);
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end) throw ConfigError(key, "expected an unsigned integer, got '" + v + "'");
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key, "expected a boolean, got '" + v + "'");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace config_detail

inline Preset parse_preset(const std::string& text) {
  using namespace config_detail;
  const std::string key = "initial_data";
  const std::string s = trim(text);
  const auto open = s.find('(');
  const std::string name = trim(s.substr(0, open));
  std::vector<std::string> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw ConfigError(key, "missing ')' in '" + s + "'");
    args = split(s.substr(open + 1, s.size() - open - 2), ',');
  }
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw ConfigError(key, name + " takes " + std::to_string(lo) + ".." + std::to_string(hi) +
                                 " arguments");
  };
  Preset p;
  if (name == "zero") {
    arity(0, 0);
    p.kind = Preset::Kind::zero;
  } else if (name == "single_mode") {
    arity(2, 3);
    p.kind = Preset::Kind::single_mode;
    p.k = to_long(key, args[0]);
    p.profile = args[1];
    if (args.size() == 3) p.amplitude = to_double(key, args[2]);
  } else if (name == "shear") {
    arity(2, 2);
    p.kind = Preset::Kind::shear;
    p.amplitude = to_double(key, args[0]);
    p.profile = args[1];
  } else if (name == "random_band") {
    arity(3, 4);
    p.kind = Preset::Kind::random_band;
    p.k_max = to_long(key, args[0]);
    p.z_modes = to_long(key, args[1]);
    p.amplitude = to_double(key, args[2]);
    if (args.size() == 4) p.seed = to_u64(key, args[3]);
  } else {
    throw ConfigError(key, "unknown preset '" + name + "'");
  }
  return p;
}

inline std::string Preset::describe() const {
  using config_detail::format_double;
  switch (kind) {
    case Kind::zero:
      return "zero";
    case Kind::single_mode:
      return "single_mode(" + std::to_string(k) + ", " + profile + ", " + format_double(amplitude) + ")";
    case Kind::shear:
      return "shear(" + format_double(amplitude) + ", " + profile + ")";
    case Kind::random_band: {
      std::string s = "random_band(" + std::to_string(k_max) + ", " + std::to_string(z_modes) + ", " +
                      format_double(amplitude);
      if (seed) s += ", " + std::to_string(*seed);
      return s + ")";
    }
  }
  return {};
}

inline bool is_known_profile(const std::string& name) {
  if (name == "linear" || name == "quadratic" || name == "tanh") return true;
  if ((name.rfind("cos", 0) == 0 || name.rfind("sin", 0) == 0) && name.size() > 3) {
    return std::all_of(name.begin() + 3, name.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
           name.substr(3) != "0";
  }
  return false;
}

inline const std::vector<std::string>& known_monitors() {
  static const std::vector<std::string> names{"energy_budget", "max_principle", "h_preservation",
                                              "bkm"};
  return names;
}

inline void SimConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw ConfigError("alpha", "must lie in (0, 2]");
  if (!(nu > 0.0)) throw ConfigError("nu", "must be > 0");
  if (n_x < 8 || n_x % 2 != 0) throw ConfigError("n_x", "must be even and >= 8");
  if (n_z < 8) throw ConfigError("n_z", "must be >= 8");
  if (!(t_end > 0.0)) throw ConfigError("t_end", "must be > 0");
  if (dt_policy == DtPolicy::fixed && !(dt > 0.0)) throw ConfigError("dt", "must be > 0");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw ConfigError("cfl_safety", "must lie in (0, 1]");
  if (!(dt_max > 0.0)) throw ConfigError("dt_max", "must be > 0");
  if (output_every == 0) throw ConfigError("output_every", "must be >= 1");
  if (!(max_principle_tol >= 0.0)) throw ConfigError("max_principle_tol", "must be >= 0");
  if (!(budget_tol >= 0.0)) throw ConfigError("budget_tol", "must be >= 0");
  if (!(blowup_factor > 1.0)) throw ConfigError("blowup_factor", "must be > 1");
  for (double t : checkpoint_times)
    if (!(t >= 0.0 && t <= t_end)) throw ConfigError("checkpoint_times", "entries must lie in [0, t_end]");
  for (const auto& m : monitors)
    if (std::find(known_monitors().begin(), known_monitors().end(), m) == known_monitors().end())
      throw ConfigError("monitors", "unknown monitor '" + m + "'");

  const auto& p = initial_data;
  const long cut = static_cast<long>(n_x / 3);
  switch (p.kind) {
    case Preset::Kind::zero:
      break;
    case Preset::Kind::single_mode:
      if (p.k < 0 || p.k > cut) throw ConfigError("initial_data", "single_mode k must lie in [0, n_x/3]");
      break;
    case Preset::Kind::shear:
      if (!(p.amplitude >= 0.0)) throw ConfigError("initial_data", "shear amplitude must be >= 0");
      break;
    case Preset::Kind::random_band:
      if (p.k_max < 1 || p.k_max > cut)
        throw ConfigError("initial_data", "random_band k_max must lie in [1, n_x/3]");
      if (p.z_modes < 1 || 2 * p.z_modes > static_cast<long>(n_z))
        throw ConfigError("initial_data", "random_band z_modes must lie in [1, n_z/2]");
      if (!(p.amplitude >= 0.0)) throw ConfigError("initial_data", "random_band amplitude must be >= 0");
      break;
  }
  if ((p.kind == Preset::Kind::single_mode || p.kind == Preset::Kind::shear) && !is_known_profile(p.profile))
    throw ConfigError("initial_data", "unknown profile '" + p.profile + "'");
  if (delta && !(*delta >= 0.0)) throw ConfigError("delta", "must be >= 0");
  if (rho && !(*rho >= 0.0)) throw ConfigError("rho", "must be >= 0");
}

/// Flat `key = value` entries, in file order. `#` starts a comment.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

inline ConfigEntries parse_config_text(const std::string& text) {
  ConfigEntries out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(config_detail::trim(line.substr(0, eq)), config_detail::trim(line.substr(eq + 1)));
  }
  return out;
}

inline ConfigEntries read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Keys accepted in a config file, in the order used when echoing.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "alpha",     "nu",          "n_x",           "n_z",
      "t_end",     "initial_data", "dt_policy",    "dt",
      "cfl_safety", "dt_max",     "nonlinear",     "advection",    "monitors",
      "delta",     "rho",         "output_every",  "checkpoint_times",
      "seed",      "max_principle_tol", "budget_tol", "blowup_factor"};
  return keys;
}

/// Builds a validated config. Later entries override earlier ones, so flag
/// overrides are appended after file entries.
inline SimConfig build_config(const ConfigEntries& entries) {
  using namespace config_detail;
  std::map<std::string, std::string> kv;
  for (const auto& [k, v] : entries) {
    if (std::find(config_keys().begin(), config_keys().end(), k) == config_keys().end())
      throw ConfigError(k, "unknown key");
    kv[k] = v;
  }
  for (const char* required : {"alpha", "nu", "n_x", "n_z", "t_end", "initial_data"})
    if (!kv.count(required)) throw ConfigError(required, "missing required key");

  SimConfig c;
  for (const auto& [k, v] : kv) {
    if (k == "alpha") c.alpha = to_double(k, v);
    else if (k == "nu") c.nu = to_double(k, v);
    else if (k == "n_x") c.n_x = to_size(k, v);
    else if (k == "n_z") c.n_z = to_size(k, v);
    else if (k == "t_end") c.t_end = to_double(k, v);
    else if (k == "initial_data") c.initial_data = parse_preset(v);
    else if (k == "dt_policy") {
      if (v == "fixed") c.dt_policy = DtPolicy::fixed;
      else if (v == "cfl") c.dt_policy = DtPolicy::cfl;
      else throw ConfigError(k, "expected 'fixed' or 'cfl', got '" + v + "'");
    } else if (k == "dt") c.dt = to_double(k, v);
    else if (k == "cfl_safety") c.cfl_safety = to_double(k, v);
    else if (k == "dt_max") c.dt_max = to_double(k, v);
    else if (k == "nonlinear") c.nonlinear = to_bool(k, v);
    else if (k == "advection") {
      if (v == "skew") c.advection = AdvectionForm::skew;
      else if (v == "convective") c.advection = AdvectionForm::convective;
      else if (v == "conservative") c.advection = AdvectionForm::conservative;
      else throw ConfigError(k, "expected 'conservative', 'skew' or 'convective', got '" + v + "'");
    } else if (k == "monitors") c.monitors = split(v, ',');
    else if (k == "delta") c.delta = to_double(k, v);
    else if (k == "rho") c.rho = to_double(k, v);
    else if (k == "output_every") c.output_every = to_size(k, v);
    else if (k == "checkpoint_times") {
      c.checkpoint_times.clear();
      for (const auto& t : split(v, ',')) c.checkpoint_times.push_back(to_double(k, t));
    } else if (k == "seed") c.seed = to_u64(k, v);
    else if (k == "max_principle_tol") c.max_principle_tol = to_double(k, v);
    else if (k == "budget_tol") c.budget_tol = to_double(k, v);
    else if (k == "blowup_factor") c.blowup_factor = to_double(k, v);
  }
  c.validate();
  return c;
}

/// Fully resolved echo of a config, one entry per key, defaults filled in.
/// Feeding the result back to build_config reproduces the config exactly.
inline ConfigEntries echo_config(const SimConfig& c) {
  using config_detail::format_double;
  auto join = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& it : items) s += (s.empty() ? "" : ",") + fmt(it);
    return s;
  };
  ConfigEntries e{
      {"alpha", format_double(c.alpha)},
      {"nu", format_double(c.nu)},
      {"n_x", std::to_string(c.n_x)},
      {"n_z", std::to_string(c.n_z)},
      {"t_end", format_double(c.t_end)},
      {"initial_data", c.initial_data.describe()},
      {"dt_policy", c.dt_policy == DtPolicy::fixed ? "fixed" : "cfl"},
      {"dt", format_double(c.dt)},
      {"cfl_safety", format_double(c.cfl_safety)},
      {"dt_max", format_double(c.dt_max)},
      {"nonlinear", c.nonlinear ? "true" : "false"},
      {"advection", to_string(c.advection)},
      {"monitors", join(c.monitors, [](const std::string& s) { return s; })},
  };
  if (c.delta) e.emplace_back("delta", format_double(*c.delta));
  if (c.rho) e.emplace_back("rho", format_double(*c.rho));
  e.emplace_back("output_every", std::to_string(c.output_every));
  e.emplace_back("checkpoint_times", join(c.checkpoint_times, format_double));
  e.emplace_back("seed", std::to_string(c.seed));
  e.emplace_back("max_principle_tol", format_double(c.max_principle_tol));
  e.emplace_back("budget_tol", format_double(c.budget_tol));
  e.emplace_back("blowup_factor", format_double(c.blowup_factor));
  return e;
}

inline std::string to_config_text(const ConfigEntries& entries) {
  std::string s;
  for (const auto& [k, v] : entries) s += k + " = " + v + "\n";
  return s;
}

}  // namespace hydrofrac
