// hydrofrac: simulation driver and exponent calculator for the fractionally
// dissipated hydrostatic (primitive) equations in a 2D periodic channel.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "hydrofrac/harness.hpp"

namespace {

using namespace hydrofrac;

int report(const std::exception& e, int code) {
  std::cerr << "hydrofrac: " << e.what() << '\n';
  return code;
}

// Runs a subcommand body and maps library errors to exit codes.
template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return report(e, exit_usage);
  } catch (const DomainError& e) {
    return report(e, exit_domain);
  } catch (const BlowupError& e) {
    return report(e, exit_blowup);
  } catch (const IoError& e) {
    return report(e, exit_io);
  } catch (const std::exception& e) {
    return report(e, exit_domain);
  }
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hydrofrac: fractional-dissipation hydrostatic flow toolkit"};
  app.set_version_flag("--version", std::string("hydrofrac ") + version_string);
  app.require_subcommand(1);
  int code = exit_ok;

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one simulation into a directory");
  std::string sim_config, sim_out = "run";
  std::vector<std::string> sim_sets;
  std::map<std::string, std::string> sim_flags;
  sim->add_option("-c,--config", sim_config, "config file or manifest.json of a previous run");
  sim->add_option("-o,--out", sim_out, "output directory")->capture_default_str();
  sim->add_option("--set", sim_sets, "key=value override (repeatable)");
  for (const auto& key : config_keys()) sim->add_option("--" + key, sim_flags[key], "override '" + key + "'");
  sim->callback([&] {
    code = guarded([&] {
      ConfigEntries entries;
      if (!sim_config.empty()) entries = load_config_source(sim_config);
      for (const auto& key : config_keys())
        if (sim->count("--" + key)) entries.emplace_back(key, sim_flags[key]);
      for (const auto& kv : sim_sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError(kv, "--set expects key=value");
        entries.emplace_back(config_detail::trim(kv.substr(0, eq)), config_detail::trim(kv.substr(eq + 1)));
      }
      const SimConfig cfg = build_config(entries);
      const auto out = simulate_to_dir(cfg, sim_out);
      const auto& last = out.result.records.back();
      std::cout << "t = " << config_detail::format_double(last.t) << ", steps = " << out.result.final_state.step_count
                << ", records = " << out.result.records.size() << '\n';
      std::cout << "max-principle margin " << config_detail::format_double(max_principle_margin(out.result.records))
                << ", bkm " << config_detail::format_double(last.bkm_accum) << '\n';
      if (out.result.halted) std::cerr << "hydrofrac: halted: " << out.result.halt_reason << '\n';
      std::cout << "wrote " << out.files.dir.string() << '\n';
      return out.exit_code;
    });
  });

  // exponents
  auto* expo = app.add_subcommand("exponents", "closed-form exponents and thresholds at one alpha");
  double expo_alpha = 0.0;
  std::string expo_csv;
  expo->add_option("-a,--alpha", expo_alpha, "dissipation order")->required();
  expo->add_option("--csv", expo_csv, "also write the one-row CSV here ('-' for stdout)");
  expo->callback([&] {
    code = guarded([&] {
      const auto r = exponents::exponent_table(expo_alpha);
      std::cout << exponents_text(r);
      if (!expo_csv.empty()) emit(exponents_csv(r), expo_csv);
      return exit_ok;
    });
  });

  // iterate
  auto* iter = app.add_subcommand("iterate", "bootstrap traces rho_k, delta_k");
  std::vector<double> iter_alphas;
  std::string iter_range, iter_out;
  auto* iter_a = iter->add_option("-a,--alpha", iter_alphas, "alpha (repeatable)");
  auto* iter_r = iter->add_option("--alphas", iter_range, "range start:stop:step");
  iter_a->excludes(iter_r);
  iter->add_option("-o,--out", iter_out, "CSV path (default stdout)");
  iter->callback([&] {
    code = guarded([&] {
      std::vector<double> alphas = iter_alphas;
      if (!iter_range.empty()) alphas = parse_alpha_range(iter_range);
      if (alphas.empty()) throw ConfigError("alpha", "give --alpha or --alphas");
      std::vector<exponents::BootstrapTrace> traces;
      for (double a : alphas) traces.push_back(exponents::bootstrap(a));
      emit(iterate_csv(traces), iter_out);
      if (!iter_out.empty() && iter_out != "-") {
        for (const auto& tr : traces) {
          std::cout << "alpha " << config_detail::format_double(tr.alpha) << ": " << exponents::to_string(tr.verdict);
          if (tr.verdict == exponents::BootstrapTrace::Verdict::reaches_rho_star)
            std::cout << " in " << tr.steps << " step(s)";
          else
            std::cout << ", limit " << config_detail::format_double(tr.limit);
          std::cout << '\n';
        }
      }
      return exit_ok;
    });
  });

  // region
  auto* reg = app.add_subcommand("region", "admissible (rho, delta) set of the small-data argument");
  double reg_alpha = 0.0;
  std::size_t reg_res = 200;
  std::string reg_upper = "alpha_half", reg_out;
  reg->add_option("-a,--alpha", reg_alpha, "alpha in [1, alpha0)")->required();
  reg->add_option("-r,--resolution", reg_res, "nodes per axis")->capture_default_str();
  reg->add_option("--upper", reg_upper, "upper bound on delta: alpha_half (h + alpha/2) or rho_half (h + rho/2)")
      ->check(CLI::IsMember({"alpha_half", "rho_half"}))
      ->capture_default_str();
  reg->add_option("-o,--out", reg_out, "CSV path (default stdout)");
  reg->callback([&] {
    code = guarded([&] {
      const auto& th = exponents::find_thresholds();
      if (!(reg_alpha >= 1.0 && reg_alpha < th.alpha0))
        throw DomainError("region needs alpha in [1, alpha0 = " + config_detail::format_double(th.alpha0) +
                          "); larger alpha is the large-data regime");
      const auto upper = reg_upper == "rho_half" ? exponents::UpperBound::rho_half : exponents::UpperBound::alpha_half;
      const auto s = exponents::sample_region(reg_alpha, reg_res, upper);
      emit(region_csv(s), reg_out);
      if (!reg_out.empty() && reg_out != "-")
        std::cout << s.count() << " of " << s.admissible.size() << " nodes admissible; (rho*, delta**) = ("
                  << config_detail::format_double(s.optimal_rho) << ", "
                  << config_detail::format_double(s.optimal_delta) << ") "
                  << (s.optimal_admissible ? "admissible" : "NOT admissible") << '\n';
      return exit_ok;
    });
  });

  // sweep
  auto* swp = app.add_subcommand("sweep", "run a list of jobs into per-job directories");
  std::string swp_file, swp_out = "sweep";
  std::size_t swp_jobs = 1;
  swp->add_option("file", swp_file, "sweep file")->required();
  swp->add_option("-o,--out", swp_out, "output directory")->capture_default_str();
  swp->add_option("-j,--jobs", swp_jobs, "parallel jobs (capped by HYDROFRAC_THREADS)")->capture_default_str();
  swp->callback([&] {
    code = guarded([&] {
      const fs::path file(swp_file);
      const SweepSpec spec = parse_sweep_text(read_text_file(file), file.parent_path());
      std::error_code ec;
      fs::create_directories(swp_out, ec);
      if (ec) throw IoError("cannot create " + swp_out + ": " + ec.message());
      const auto rows = run_sweep(spec, swp_out, swp_jobs);
      write_text_file(fs::path(swp_out) / "summary.csv", sweep_summary_csv(rows));
      for (const auto& r : rows)
        std::cout << r.job << ": " << r.status << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
      return sweep_exit_code(rows);
    });
  });

  // verify
  auto* ver = app.add_subcommand("verify", "re-check a run directory's diagnostics");
  std::string ver_dir;
  ver->add_option("dir", ver_dir, "run directory")->required();
  ver->callback([&] {
    code = guarded([&] {
      const auto checks = verify_run(ver_dir);
      bool all = true;
      for (const auto& c : checks) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
      }
      return all ? exit_ok : exit_domain;
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int r = app.exit(e);
    return r == 0 ? 0 : exit_usage;
  }
  return code;
}
