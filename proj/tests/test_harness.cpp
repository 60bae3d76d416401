#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "hydrofrac/harness.hpp"

using namespace hydrofrac;

namespace {

const char* kSmallConfig =
    "alpha = 1.15\n"
    "nu = 0.1\n"
    "n_x = 16\n"
    "n_z = 8\n"
    "t_end = 0.05\n"
    "initial_data = random_band(3, 2, 1.0)\n"
    "seed = 5\n";

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("hydrofrac_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string bin() {
  const char* b = std::getenv("HYDROFRAC_BIN");
  return b ? b : "";
}

int cli(const std::string& args) {
  const std::string cmd = "\"" + bin() + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

SimConfig small_config() { return build_config(parse_config_text(kSmallConfig)); }

}  // namespace

TEST(Config, ParsesAndEchoesRoundTrip) {
  const SimConfig c = small_config();
  EXPECT_EQ(c.alpha, 1.15);
  EXPECT_EQ(c.n_x, 16u);
  EXPECT_EQ(c.advection, AdvectionForm::conservative);
  const SimConfig back = build_config(echo_config(c));
  EXPECT_EQ(echo_config(back), echo_config(c));
  EXPECT_EQ(parse_config_text(to_config_text(echo_config(c))), echo_config(c));
}

TEST(Config, BadAlphaNamesKey) {
  auto entries = parse_config_text(kSmallConfig);
  entries.emplace_back("alpha", "2.5");
  try {
    build_config(entries);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.key(), "alpha");
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
}

TEST(Config, Rejections) {
  auto with = [](const std::string& k, const std::string& v) {
    auto e = parse_config_text(kSmallConfig);
    e.emplace_back(k, v);
    return e;
  };
  EXPECT_THROW(build_config(with("bogus", "1")), ConfigError);
  EXPECT_THROW(build_config(with("n_x", "15")), ConfigError);
  EXPECT_THROW(build_config(with("nu", "0")), ConfigError);
  EXPECT_THROW(build_config(with("initial_data", "random_band(9, 1, 1.0)")), ConfigError);
  EXPECT_THROW(build_config(with("initial_data", "spiral(1)")), ConfigError);
  EXPECT_THROW(build_config(with("dt_policy", "adaptive")), ConfigError);
  EXPECT_THROW(build_config(with("checkpoint_times", "0.1")), ConfigError);
  EXPECT_THROW(build_config(ConfigEntries{{"alpha", "1.1"}}), ConfigError);
}

TEST(Config, LaterEntriesWin) {
  auto e = parse_config_text(kSmallConfig);
  e.emplace_back("nu", "0.25");
  EXPECT_EQ(build_config(e).nu, 0.25);
}

TEST(Checkpoint, RoundTripBitExact) {
  TempDir d;
  SimConfig c = small_config();
  const RunResult r = run(c);
  const fs::path p = d.path() / "s.bin";
  write_checkpoint(p.string(), r.final_state);
  const State back = read_checkpoint(p.string());
  EXPECT_EQ(back.t, r.final_state.t);
  const Field a = r.final_state.u.to_physical();
  const Field b = back.u.to_physical();
  ASSERT_EQ(a.values().size(), b.values().size());
  EXPECT_EQ(std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)), 0);
  EXPECT_EQ(encode_checkpoint(back), encode_checkpoint(r.final_state));
}

TEST(Checkpoint, DistinctErrors) {
  const SimConfig c = small_config();
  const auto bytes = encode_checkpoint(initial_state(c));
  auto kind_of = [](const std::vector<char>& b) {
    try {
      decode_checkpoint(b);
    } catch (const CheckpointError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error";
    return CheckpointError::Kind::io;
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(kind_of(bad_magic), CheckpointError::Kind::magic);
  auto bad_version = bytes;
  bad_version[4] = 9;
  EXPECT_EQ(kind_of(bad_version), CheckpointError::Kind::version);
  EXPECT_EQ(kind_of(std::vector<char>(bytes.begin(), bytes.end() - 3)), CheckpointError::Kind::truncated);
  EXPECT_THROW(read_checkpoint("/nonexistent/dir/x.bin"), IoError);
}

TEST(Csv, RoundTrip) {
  const RunResult r = run(small_config());
  std::stringstream ss;
  write_diagnostics_csv(ss, r.records);
  const auto back = read_diagnostics_csv(ss);
  ASSERT_EQ(back.size(), r.records.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    EXPECT_EQ(detail::columns_of(back[i]), detail::columns_of(r.records[i]));
  std::stringstream bad("t,energy\n1,2\n");
  EXPECT_THROW(read_diagnostics_csv(bad), IoError);
}

TEST(Manifest, RerunIsByteIdentical) {
  TempDir d;
  const auto first = simulate_to_dir(small_config(), d.path() / "a");
  const SimConfig again = build_config(load_config_source(first.files.manifest));
  const auto second = simulate_to_dir(again, d.path() / "b");
  EXPECT_EQ(read_text_file(first.files.diagnostics), read_text_file(second.files.diagnostics));
  EXPECT_EQ(read_text_file(first.files.final_checkpoint), read_text_file(second.files.final_checkpoint));
  const auto j = nlohmann::json::parse(read_text_file(first.files.manifest));
  EXPECT_EQ(j["tool"], "hydrofrac");
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["config"]["alpha"], "1.15");
}

TEST(Manifest, CheckpointFilesWritten) {
  TempDir d;
  auto e = parse_config_text(kSmallConfig);
  e.emplace_back("checkpoint_times", "0,0.02");
  const auto out = simulate_to_dir(build_config(e), d.path());
  ASSERT_EQ(out.files.checkpoints.size(), 2u);
  EXPECT_EQ(read_checkpoint(out.files.checkpoints[0].string()).t, 0.0);
  EXPECT_EQ(read_checkpoint(out.files.checkpoints[1].string()).t, 0.02);
}

TEST(Verify, PassesOnFreshRunFailsOnTamper) {
  TempDir d;
  simulate_to_dir(small_config(), d.path());
  for (const auto& c : verify_run(d.path())) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  std::string csv = read_text_file(d.path() / "diagnostics.csv");
  // Break time monotonicity by duplicating the last row.
  const auto last = csv.rfind('\n', csv.size() - 2);
  csv += csv.substr(last + 1);
  write_text_file(d.path() / "diagnostics.csv", csv);
  bool any_fail = false;
  for (const auto& c : verify_run(d.path())) any_fail = any_fail || !c.pass;
  EXPECT_TRUE(any_fail);
}

TEST(Sweep, IsolatesInvalidJob) {
  TempDir d;
  write_text_file(d.path() / "base.cfg", kSmallConfig);
  const std::string text =
      "base = base.cfg\n"
      "t_end = 0.02\n"
      "job good_a alpha=1.1\n"
      "job broken alpha=2.5\n"
      "job good_b alpha=1.2 nu=0.2\n";
  const SweepSpec spec = parse_sweep_text(text, d.path());
  ASSERT_EQ(spec.jobs.size(), 3u);
  const auto rows = run_sweep(spec, d.path() / "out", 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].status, "ok");
  EXPECT_EQ(rows[1].status, "config_error");
  EXPECT_NE(rows[1].error.find("alpha"), std::string::npos);
  EXPECT_EQ(rows[2].status, "ok");
  EXPECT_EQ(rows[2].nu, 0.2);
  EXPECT_TRUE(fs::exists(d.path() / "out" / "good_a" / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(d.path() / "out" / "good_b" / "final.bin"));
  EXPECT_FALSE(fs::exists(d.path() / "out" / "broken"));
  EXPECT_EQ(sweep_exit_code(rows), exit_usage);
  const std::string summary = sweep_summary_csv(rows);
  EXPECT_EQ(summary.rfind("job,status,", 0), 0u);
  EXPECT_NE(summary.find("good_b,ok,1.2,0.2,"), std::string::npos);
}

TEST(Sweep, ParseErrors) {
  EXPECT_THROW(parse_sweep_text("alpha = 1\n", "."), ConfigError);
  EXPECT_THROW(parse_sweep_text("job a x=1\njob a y=2\n", "."), ConfigError);
  EXPECT_THROW(parse_sweep_text("job ../up alpha=1\n", "."), ConfigError);
  EXPECT_THROW(parse_sweep_text("job a novalue\n", "."), ConfigError);
}

TEST(Sweep, WorkerCountHonoursEnvironment) {
  ::setenv("HYDROFRAC_THREADS", "2", 1);
  EXPECT_EQ(worker_count(8, 10), 2u);
  EXPECT_EQ(worker_count(8, 1), 1u);
  ::setenv("HYDROFRAC_THREADS", "junk", 1);
  EXPECT_EQ(worker_count(3, 10), 3u);
  ::unsetenv("HYDROFRAC_THREADS");
  EXPECT_EQ(worker_count(0, 10), 1u);
}

TEST(Emitters, ExponentsAndIterate) {
  const std::string csv = exponents_csv(exponents::exponent_table(1.19));
  EXPECT_NE(csv.find("undefined"), std::string::npos);
  const auto it = iterate_csv({exponents::bootstrap(1.15)});
  EXPECT_EQ(it.rfind("alpha,k,rho,delta,verdict,steps,limit\n", 0), 0u);
  EXPECT_NE(it.find("1.15,1,"), std::string::npos);
  EXPECT_EQ(parse_alpha_range("1:1.1:0.05").size(), 3u);
  EXPECT_THROW(parse_alpha_range("1:0.5:0.1"), ConfigError);
  const auto reg = region_csv(exponents::sample_region(1.05, 4));
  EXPECT_EQ(std::count(reg.begin(), reg.end(), '\n'), 1 + 16 + 1);
}

TEST(Cli, ExitCodes) {
  ASSERT_FALSE(bin().empty()) << "HYDROFRAC_BIN not set";
  TempDir d;
  write_text_file(d.path() / "ok.cfg", kSmallConfig);
  const std::string out = (d.path() / "run").string();
  EXPECT_EQ(cli("simulate -c " + (d.path() / "ok.cfg").string() + " -o " + out), 0);
  EXPECT_EQ(cli("verify " + out), 0);
  EXPECT_EQ(cli("simulate -c " + (d.path() / "ok.cfg").string() + " --alpha 2.5 -o " + out + "_bad"), 1);
  EXPECT_EQ(cli("simulate -c " + (d.path() / "missing.cfg").string() + " -o " + out), 4);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("exponents --alpha 1.05"), 0);
  EXPECT_EQ(cli("iterate --alphas 1.0:1.2:0.05"), 0);
  EXPECT_EQ(cli("region --alpha 1.05 --resolution 20 -o " + (d.path() / "r.csv").string()), 0);
  EXPECT_EQ(cli("region --alpha 1.15"), 2);
}

TEST(Cli, FlagOverridesConfigFile) {
  ASSERT_FALSE(bin().empty());
  TempDir d;
  write_text_file(d.path() / "ok.cfg", kSmallConfig);
  const fs::path out = d.path() / "run";
  ASSERT_EQ(cli("simulate -c " + (d.path() / "ok.cfg").string() + " --nu 0.3 --set seed=9 -o " + out.string()), 0);
  const auto j = nlohmann::json::parse(read_text_file(out / "manifest.json"));
  EXPECT_EQ(j["config"]["nu"], "0.3");
  EXPECT_EQ(j["config"]["seed"], "9");
  // A manifest is accepted as the config source.
  EXPECT_EQ(cli("simulate -c " + (out / "manifest.json").string() + " -o " + (d.path() / "again").string()), 0);
  EXPECT_EQ(read_text_file(out / "diagnostics.csv"), read_text_file(d.path() / "again" / "diagnostics.csv"));
}
