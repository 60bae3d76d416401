#pragma once

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hydrofrac/checkpoint.hpp"
#include "hydrofrac/csv.hpp"
#include "hydrofrac/exponents.hpp"
#include "hydrofrac/simulation.hpp"

namespace hydrofrac {

namespace fs = std::filesystem;

inline constexpr const char* version_string = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_domain = 2, exit_blowup = 3, exit_io = 4 };

inline void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Run directories and manifests

struct RunFiles {
  fs::path dir;
  fs::path manifest, diagnostics, final_checkpoint;
  std::vector<fs::path> checkpoints;  // one per sorted checkpoint time
};

inline RunFiles plan_outputs(const fs::path& dir, const SimConfig& cfg) {
  RunFiles f;
  f.dir = dir;
  f.manifest = dir / "manifest.json";
  f.diagnostics = dir / "diagnostics.csv";
  f.final_checkpoint = dir / "final.bin";
  for (std::size_t i = 0; i < cfg.checkpoint_times.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "checkpoint_%03zu.bin", i);
    f.checkpoints.push_back(dir / name);
  }
  return f;
}

inline nlohmann::ordered_json make_manifest(const SimConfig& cfg, const RunFiles& files,
                                            const std::string& timestamp) {
  nlohmann::ordered_json j;
  j["tool"] = "hydrofrac";
  j["version"] = version_string;
  j["timestamp"] = timestamp;
  j["seed"] = cfg.seed;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : echo_config(cfg)) c[k] = v;
  j["config"] = c;
  std::vector<std::string> outputs{files.diagnostics.filename().string()};
  for (const auto& p : files.checkpoints) outputs.push_back(p.filename().string());
  outputs.push_back(files.final_checkpoint.filename().string());
  j["outputs"] = outputs;
  return j;
}

inline ConfigEntries manifest_config(const nlohmann::json& j) {
  if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("config", "manifest has no config object");
  ConfigEntries e;
  for (const auto& [k, v] : j["config"].items()) {
    if (!v.is_string()) throw ConfigError(k, "manifest values must be strings");
    e.emplace_back(k, v.get<std::string>());
  }
  return e;
}

/// A config file or a manifest.json written by a previous run.
inline ConfigEntries load_config_source(const fs::path& path) {
  const std::string text = read_text_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config", "cannot parse manifest " + path.string() + ": " + e.what());
    }
    return manifest_config(j);
  }
  return parse_config_text(text);
}

struct SimulateOutcome {
  int exit_code = exit_ok;
  RunResult result;
  RunFiles files;
};

/// Writes manifest.json first, then runs, then diagnostics.csv, the timed
/// checkpoints and final.bin.
inline SimulateOutcome simulate_to_dir(const SimConfig& cfg, const fs::path& dir,
                                       const std::string& timestamp = utc_timestamp()) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  SimulateOutcome out;
  out.files = plan_outputs(dir, cfg);
  write_text_file(out.files.manifest, make_manifest(cfg, out.files, timestamp).dump(2) + "\n");

  std::size_t next = 0;
  const auto sink = [&](const State& s) {
    if (next < out.files.checkpoints.size()) write_checkpoint(out.files.checkpoints[next++].string(), s);
  };
  out.result = run(cfg, sink);

  std::ostringstream csv;
  write_diagnostics_csv(csv, out.result.records);
  write_text_file(out.files.diagnostics, csv.str());
  write_checkpoint(out.files.final_checkpoint.string(), out.result.final_state);
  out.exit_code = out.result.halted ? exit_blowup : exit_ok;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepJob {
  std::string name;
  ConfigEntries overrides;
};

struct SweepSpec {
  ConfigEntries base;
  std::vector<SweepJob> jobs;
};

/// Sweep file:
///   base = path/to/base.cfg        (relative to the sweep file)
///   key = value                    (shared override)
///   job <name> key=value ...       (one job; later keys win)
inline SweepSpec parse_sweep_text(const std::string& text, const fs::path& base_dir) {
  SweepSpec spec;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "sweep line " + std::to_string(lineno);
    if (line.rfind("job", 0) == 0 && line.size() > 3 && (line[3] == ' ' || line[3] == '\t')) {
      std::istringstream toks(line.substr(4));
      SweepJob job;
      toks >> job.name;
      if (job.name.empty() || job.name.find_first_not_of(
                                  "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
                                  std::string::npos || job.name[0] == '.')
        throw ConfigError("job", where + ": bad job name '" + job.name + "'");
      for (const auto& j : spec.jobs)
        if (j.name == job.name) throw ConfigError("job", where + ": duplicate job name '" + job.name + "'");
      std::string tok;
      while (toks >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("job", where + ": expected key=value, got '" + tok + "'");
        job.overrides.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
      }
      spec.jobs.push_back(std::move(job));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", where + ": expected 'job ...' or key = value");
    const std::string key = config_detail::trim(line.substr(0, eq));
    const std::string value = config_detail::trim(line.substr(eq + 1));
    if (key == "base") {
      const auto entries = load_config_source(base_dir / value);
      spec.base.insert(spec.base.end(), entries.begin(), entries.end());
    } else {
      spec.base.emplace_back(key, value);
    }
  }
  if (spec.jobs.empty()) throw ConfigError("job", "sweep defines no jobs");
  return spec;
}

struct SweepRow {
  std::string job;
  std::string status;  // ok, halted, config_error, domain_error, io_error, error
  int exit_code = exit_ok;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double nu = std::numeric_limits<double>::quiet_NaN();
  double bkm_accum = std::numeric_limits<double>::quiet_NaN();
  double max_principle_margin = std::numeric_limits<double>::quiet_NaN();
  bool halted = false;
  std::string error;
};

/// Worker count: the request, capped by HYDROFRAC_THREADS and by the job count.
inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested == 0 ? 1 : requested;
  if (const char* env = std::getenv("HYDROFRAC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

inline SweepRow run_sweep_job(const SweepSpec& spec, const SweepJob& job, const fs::path& out_dir) {
  SweepRow row;
  row.job = job.name;
  try {
    ConfigEntries entries = spec.base;
    entries.insert(entries.end(), job.overrides.begin(), job.overrides.end());
    const SimConfig cfg = build_config(entries);
    row.alpha = cfg.alpha;
    row.nu = cfg.nu;
    const auto out = simulate_to_dir(cfg, out_dir / job.name);
    row.bkm_accum = bkm_integral(out.result.records);
    row.max_principle_margin = max_principle_margin(out.result.records);
    row.halted = out.result.halted;
    row.exit_code = out.exit_code;
    row.status = row.halted ? "halted" : "ok";
    if (row.halted) row.error = out.result.halt_reason;
  } catch (const ConfigError& e) {
    row.status = "config_error";
    row.exit_code = exit_usage;
    row.error = e.what();
  } catch (const DomainError& e) {
    row.status = "domain_error";
    row.exit_code = exit_domain;
    row.error = e.what();
  } catch (const IoError& e) {
    row.status = "io_error";
    row.exit_code = exit_io;
    row.error = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.exit_code = exit_domain;
    row.error = e.what();
  }
  return row;
}

/// Runs every job on a bounded pool; rows come back in sweep-file order.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const fs::path& out_dir, std::size_t workers) {
  std::vector<SweepRow> rows(spec.jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < spec.jobs.size(); i = next++) rows[i] = run_sweep_job(spec, spec.jobs[i], out_dir);
  };
  const std::size_t n = worker_count(workers, spec.jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

inline std::string sweep_summary_csv(const std::vector<SweepRow>& rows) {
  using config_detail::format_double;
  auto num = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  std::string s = "job,status,alpha,nu,bkm_accum,max_principle_margin,halted,error\n";
  for (const auto& r : rows) {
    s += csv_escape(r.job) + ',' + r.status + ',' + num(r.alpha) + ',' + num(r.nu) + ',' + num(r.bkm_accum) +
         ',' + num(r.max_principle_margin) + ',' + (r.halted ? "true" : "false") + ',' + csv_escape(r.error) +
         '\n';
  }
  return s;
}

inline int sweep_exit_code(const std::vector<SweepRow>& rows) {
  int code = exit_ok;
  for (const auto& r : rows) code = std::max(code, r.exit_code);
  return code;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Re-checks a finished run directory from its files alone.
inline std::vector<Check> verify_run(const fs::path& dir) {
  using config_detail::format_double;
  const SimConfig cfg = build_config(load_config_source(dir / "manifest.json"));
  std::ifstream in(dir / "diagnostics.csv");
  if (!in) throw IoError("cannot read " + (dir / "diagnostics.csv").string());
  const auto rec = read_diagnostics_csv(in);
  std::vector<Check> out;
  if (rec.empty()) {
    out.push_back({"records present", false, "diagnostics.csv has no rows"});
    return out;
  }

  bool finite = true;
  for (const auto& r : rec)
    for (double v : detail::columns_of(r)) finite = finite && std::isfinite(v);
  out.push_back({"records finite", finite, std::to_string(rec.size()) + " rows"});

  bool increasing = true;
  for (std::size_t i = 1; i < rec.size(); ++i) increasing = increasing && rec[i].t > rec[i - 1].t;
  out.push_back({"time increasing", increasing, "t from " + format_double(rec.front().t) + " to " + format_double(rec.back().t)});

  out.push_back({"accumulators nondecreasing", accumulators_monotone(rec), "diss_u, diss_omega, bkm"});

  const double e0 = rec.front().energy_u;
  const double w0 = rec.front().energy_omega;
  bool consistent = true;
  for (const auto& r : rec) {
    const double ru = r.energy_u + r.diss_u_accum - e0;
    const double rw = r.energy_omega + r.diss_omega_accum - w0;
    consistent = consistent && std::abs(ru - r.budget_residual_u) <= 1e-14 * (r.energy_u + r.diss_u_accum + e0) &&
                 std::abs(rw - r.budget_residual_omega) <= 1e-14 * (r.energy_omega + r.diss_omega_accum + w0);
  }
  out.push_back({"budget columns consistent", consistent, "residual = energy + dissipation - initial energy"});

  double worst_u = -std::numeric_limits<double>::infinity();
  double worst_w = worst_u;
  for (const auto& r : rec) {
    worst_u = std::max(worst_u, r.budget_residual_u);
    worst_w = std::max(worst_w, r.budget_residual_omega);
  }
  out.push_back({"energy inequality u", worst_u <= cfg.budget_tol * e0,
                 "max residual " + format_double(worst_u) + " vs " + format_double(cfg.budget_tol * e0)});
  out.push_back({"energy inequality omega", worst_w <= cfg.budget_tol * w0,
                 "max residual " + format_double(worst_w) + " vs " + format_double(cfg.budget_tol * w0)});

  const double bound = rec.front().omega_linf * (1.0 + cfg.max_principle_tol);
  double peak = 0.0;
  for (const auto& r : rec) peak = std::max(peak, r.omega_linf);
  out.push_back({"maximum principle", peak <= bound,
                 "margin " + format_double(bound - peak)});

  const fs::path final_cp = dir / "final.bin";
  if (fs::exists(final_cp)) {
    try {
      const State s = read_checkpoint(final_cp.string());
      const bool shape = s.u.grid() == cfg.grid();
      const bool time = s.t == rec.back().t;
      out.push_back({"final checkpoint", shape && time && s.u.all_finite(),
                     "t = " + format_double(s.t) + (shape ? "" : ", grid mismatch")});
    } catch (const CheckpointError& e) {
      out.push_back({"final checkpoint", false, e.what()});
    }
  } else {
    out.push_back({"final checkpoint", false, "final.bin missing"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exponent tables

inline std::string exponents_csv(const exponents::ExponentReport& r) {
  using config_detail::format_double;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("undefined"); };
  std::string s =
      "alpha,delta1,delta_star,delta2,delta_dstar,delta_m,rho_star,rho1,rho2,rho_M,alpha0,alpha1,alpha2,"
      "alpha_split,global_regularity,one_step,small_data,critical\n";
  const auto& t = r.thresholds;
  s += format_double(r.alpha) + ',' + opt(r.delta1) + ',' + opt(r.delta_star) + ',' + opt(r.delta2) + ',' +
       opt(r.delta_dstar) + ',' + opt(r.delta_m) + ',' + opt(r.rho_star) + ',' + opt(r.rho1) + ',' + opt(r.rho2) +
       ',' + opt(r.rho_M) + ',' + format_double(t.alpha0) + ',' + format_double(t.alpha1) + ',' +
       format_double(t.alpha2) + ',' + format_double(t.alpha_split) + ',' + (r.global_regularity ? "1" : "0") +
       ',' + (r.one_step ? "1" : "0") + ',' + (r.small_data ? "1" : "0") + ',' + (r.critical ? "1" : "0") + '\n';
  return s;
}

inline std::string exponents_text(const exponents::ExponentReport& r) {
  using config_detail::format_double;
  std::ostringstream o;
  auto line = [&](const char* name, const std::optional<double>& v) {
    o << "  " << name << std::string(14 - std::string(name).size(), ' ') << (v ? format_double(*v) : "undefined") << '\n';
  };
  o << "alpha = " << format_double(r.alpha) << '\n';
  line("delta1", r.delta1);
  line("delta_star", r.delta_star);
  line("delta2", r.delta2);
  line("delta_dstar", r.delta_dstar);
  line("delta_m", r.delta_m);
  line("rho_star", r.rho_star);
  line("rho1", r.rho1);
  line("rho2", r.rho2);
  line("rho_M", r.rho_M);
  const auto& t = r.thresholds;
  o << "thresholds: alpha0 = " << format_double(t.alpha0) << ", alpha1 = " << format_double(t.alpha1)
    << ", alpha2 = " << format_double(t.alpha2) << ", 4/sqrt(15) = " << format_double(t.alpha_split) << '\n';
  o << "regime:";
  if (r.critical) o << " critical";
  if (r.small_data) o << " small-data";
  if (r.global_regularity) o << " global-regularity (alpha >= alpha0)";
  if (r.one_step) o << " one-step (alpha >= alpha1)";
  if (!r.in_window) o << " outside [1, 6/5]";
  o << '\n';
  return o.str();
}

inline std::string iterate_csv(const std::vector<exponents::BootstrapTrace>& traces) {
  using config_detail::format_double;
  std::string s = "alpha,k,rho,delta,verdict,steps,limit\n";
  for (const auto& tr : traces) {
    const std::string verdict = exponents::to_string(tr.verdict);
    const std::string limit =
        tr.verdict == exponents::BootstrapTrace::Verdict::converges_to_rho_M ? format_double(tr.limit) : "";
    for (std::size_t k = 1; k < tr.rho.size(); ++k)
      s += format_double(tr.alpha) + ',' + std::to_string(k) + ',' + format_double(tr.rho[k]) + ',' +
           format_double(tr.delta[k - 1]) + ',' + verdict + ',' + std::to_string(tr.steps) + ',' + limit + '\n';
  }
  return s;
}

/// Parses "a:b:step" into a ladder of alphas including both ends.
inline std::vector<double> parse_alpha_range(const std::string& text) {
  const auto parts = config_detail::split(text, ':');
  if (parts.size() != 3) throw ConfigError("alphas", "expected start:stop:step");
  const double a = config_detail::to_double("alphas", parts[0]);
  const double b = config_detail::to_double("alphas", parts[1]);
  const double h = config_detail::to_double("alphas", parts[2]);
  if (!(h > 0.0) || !(b >= a)) throw ConfigError("alphas", "need step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(a + static_cast<double>(i) * h);
  return out;
}

inline std::string region_csv(const exponents::RegionSample& r) {
  using config_detail::format_double;
  std::string s = "rho,delta,admissible,optimal\n";
  for (std::size_t i = 0; i < r.rho.size(); ++i)
    s += format_double(r.rho[i]) + ',' + format_double(r.delta[i]) + ',' + (r.admissible[i] ? "1" : "0") + ",0\n";
  s += format_double(r.optimal_rho) + ',' + format_double(r.optimal_delta) + ',' +
       (r.optimal_admissible ? "1" : "0") + ",1\n";
  return s;
}

}  // namespace hydrofrac
