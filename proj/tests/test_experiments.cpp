#include "dqsim/experiments.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace dqsim;
using nlohmann::json;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("no column " + name);
  }
  std::vector<double> column(const std::string& name) const {
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[col(name)]);
    return out;
  }
};

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream h(line);
  for (std::string cell; std::getline(h, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream r(line);
    for (std::string cell; std::getline(r, cell, ',');) row.push_back(std::stod(cell));
    t.rows.push_back(row);
  }
  return t;
}

const OutputFile& must_find(const RunResult& r, const std::string& name) {
  const OutputFile* f = r.find(name);
  if (!f) throw std::runtime_error("missing output " + name);
  return *f;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dqsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DQSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// --- configuration -----------------------------------------------------------------

TEST(Config, DefaultsAndPresets) {
  const RunConfig cfg = parse_config(json::object());
  EXPECT_EQ(cfg.protocol, Protocol::XY);
  EXPECT_EQ(cfg.j_sign, -1);
  EXPECT_EQ(cfg.theta_grid.size(), 33u);
  EXPECT_TRUE(cfg.noise.has_value());
  EXPECT_EQ(cfg.n_list, (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_NO_THROW(validate_config(cfg));
  for (const char* name : {"fig2", "fig3", "up-up", "bell"}) EXPECT_NEAR(preset_state(name).norm(), 1.0, 1e-15);
  EXPECT_THROW(preset_state("down"), ConfigError);
}

TEST(Config, ParsesAllFields) {
  const json j = json::parse(R"({
    "protocol": "ising", "theta_grid": ["pi/4", "pi/2", "3*pi/4", 3.0, "3pi/2"], "n_steps": 3,
    "n_list": [1, 2], "b_over_j": 3, "j_sign": 1, "initial_state": [[0.6, 0], 0, [0, 0.8], 0],
    "noise": {"t1_us": [10, 9], "t2_us": [8, 7], "jz_tilde_deg": 1.0, "crosstalk_deg": 0},
    "tomography": "state", "tomography_sigma": 0.01, "seed": 9, "output_path": "x",
    "timing": {"single_qubit_ns": 20, "buffer_ns": 10, "post_flux_wait_ns": 30, "detuning_mhz": 250, "refocus": true},
    "theta_to_ns": 2.0
  })");
  const RunConfig cfg = parse_config(j);
  EXPECT_EQ(cfg.protocol, Protocol::Ising);
  ASSERT_EQ(cfg.theta_grid.size(), 5u);
  EXPECT_DOUBLE_EQ(cfg.theta_grid[0], kPi / 4);
  EXPECT_DOUBLE_EQ(cfg.theta_grid[2], 3 * kPi / 4);
  EXPECT_DOUBLE_EQ(cfg.theta_grid[4], 3 * kPi / 2);
  EXPECT_EQ(cfg.initial_state(2), Complex(0, 0.8));
  EXPECT_EQ(cfg.initial_state_name, "custom");
  EXPECT_EQ(cfg.noise->t1_us[1], 9.0);
  EXPECT_EQ(cfg.tomography, TomographyMode::State);
  EXPECT_DOUBLE_EQ(cfg.timing.phase_period_ns, 4.0);
  EXPECT_TRUE(cfg.timing.refocus);
  const auto eff = cfg.effective_noise();
  EXPECT_DOUBLE_EQ(eff->durations.xy_buffer_ns, 10.0);
  EXPECT_DOUBLE_EQ(eff->theta_to_ns, 2.0);
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Config, GridObjectAndNoiseOff) {
  const RunConfig cfg = parse_config(json::parse(R"({"theta_grid": {"start": 0, "stop": "3pi", "points": 256}, "noise": "off"})"));
  ASSERT_EQ(cfg.theta_grid.size(), 256u);
  EXPECT_DOUBLE_EQ(cfg.theta_grid.back(), 3 * kPi);
  EXPECT_FALSE(cfg.noise.has_value());
}

TEST(Config, Rejections) {
  auto bad = [](const char* text) {
    RunConfig cfg = parse_config(json::parse(text));
    validate_config(cfg);
  };
  EXPECT_THROW(bad(R"({"theta_grid": []})"), ConfigError);
  EXPECT_THROW(bad(R"({"theta_grid": [1, 0.5]})"), ConfigError);
  EXPECT_THROW(bad(R"({"theta_grid": [1, 1]})"), ConfigError);
  EXPECT_THROW(bad(R"({"theta_grid": [-1]})"), ConfigError);
  EXPECT_THROW(bad(R"({"theta_grid": ["two pi"]})"), ConfigError);
  EXPECT_THROW(bad(R"({"protocol": "xyz"})"), ConfigError);
  EXPECT_THROW(bad(R"({"thetagrid": [1]})"), ConfigError);
  EXPECT_THROW(bad(R"({"n_steps": 0})"), ConfigError);
  EXPECT_THROW(bad(R"({"j_sign": 2})"), ConfigError);
  EXPECT_THROW(bad(R"({"initial_state": [0, 0, 0, 0]})"), ConfigError);
  EXPECT_THROW(bad(R"({"initial_state": [1, 0]})"), ConfigError);
  EXPECT_THROW(bad(R"({"noise": {"t1_us": [1, 1], "t2_us": [3, 1]}})"), ConfigError);
  EXPECT_THROW(bad(R"({"noise": "maybe"})"), ConfigError);
  EXPECT_THROW(bad(R"({"tomography": "full"})"), ConfigError);
  EXPECT_THROW(bad(R"({"seed": "abc"})"), ConfigError);
  EXPECT_THROW(bad(R"({"timing": {"detuning_mhz": 0}})"), ConfigError);
  EXPECT_THROW(bad(R"([1, 2])"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/dqsim.json"), ConfigError);
}

TEST(Config, ShippedConfigsLoad) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(DQSIM_TEST_DATA_DIR) + "/../configs")) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(validate_config(load_config(entry.path()))) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
}

// --- simulate ----------------------------------------------------------------------

TEST(Simulate, XYAtPiPointsAlongPlusYAndPlusZ) {
  RunConfig cfg;
  cfg.noise.reset();
  cfg.theta_grid = {0.0, kPi / 2, kPi};
  const RunResult r = run_simulate(cfg);
  const Table t = parse_csv(must_find(r, "simulate_xy.csv").content);
  EXPECT_EQ(t.header.size(), 10u);
  EXPECT_NEAR(t.rows[2][t.col("sy1")], 1.0, 1e-9);
  EXPECT_NEAR(t.rows[2][t.col("sz2")], 1.0, 1e-9);
  EXPECT_NEAR(t.rows[1][t.col("negativity")], 0.25, 1e-9);
  for (const auto& row : t.rows) EXPECT_NEAR(row[t.col("fid_vs_exact")], 1.0, 1e-9);
}

TEST(Simulate, HeisenbergHalfPiSwapsBlochVectors) {
  RunConfig cfg;
  cfg.protocol = Protocol::Heisenberg;
  cfg.noise.reset();
  cfg.theta_grid = {kPi / 2};
  const Table t = parse_csv(must_find(run_simulate(cfg), "simulate_heisenberg.csv").content);
  // fig2 starts with Q1 along +z and Q2 along +x.
  EXPECT_NEAR(t.rows[0][t.col("sx1")], 1.0, 1e-9);
  EXPECT_NEAR(t.rows[0][t.col("sz2")], 1.0, 1e-9);
  EXPECT_NEAR(t.rows[0][t.col("sz1")], 0.0, 1e-9);
  EXPECT_NEAR(t.rows[0][t.col("sx2")], 0.0, 1e-9);
}

TEST(Simulate, IsingCorrelatorMatchesCompiledCircuit) {
  RunConfig cfg = parse_config(json::parse(
      R"({"protocol": "ising", "b_over_j": 3, "n_steps": 6, "initial_state": "fig3", "noise": "off",
          "theta_grid": {"start": 0, "stop": "3pi", "points": 256}})"));
  const Table t = parse_csv(must_find(run_simulate(cfg), "simulate_ising.csv").content);
  ASSERT_EQ(t.rows.size(), 256u);
  const StateVector psi0(preset_state("fig3"));
  for (std::size_t k : {0u, 17u, 128u, 255u}) {
    const double theta = t.rows[k][0];
    const double xx = expectation(psi0.evolved(circuit_unitary(compile_ising({theta, 6, 3.0, -1}))), pauli_string("XX"));
    EXPECT_NEAR(t.rows[k][t.col("xx_corr")], xx, 1e-11);
  }
  EXPECT_NEAR(t.rows[0][t.col("xx_corr")], 0.0, 1e-12);
}

TEST(Simulate, NoiseAndTomographyColumns) {
  RunConfig cfg;
  cfg.protocol = Protocol::Ising;
  cfg.b_over_j = 3.0;
  cfg.n_steps = 2;
  cfg.initial_state = preset_state("fig3");
  cfg.theta_grid = {kPi / 4, kPi / 2};
  cfg.tomography = TomographyMode::State;
  cfg.tomography_sigma = 0.0;
  const Table t = parse_csv(must_find(run_simulate(cfg, true), "simulate_ising.csv").content);
  EXPECT_EQ(t.header.size(), 28u);
  for (const auto& row : t.rows) {
    EXPECT_LT(row[t.col("noisy_fid_vs_exact")], row[t.col("fid_vs_exact")]);
    EXPECT_NEAR(row[t.col("tomo_sx1")], row[t.col("noisy_sx1")], 1e-9);
  }
  EXPECT_NE(run_simulate(cfg, true).find("simulate_ising.gp"), nullptr);
}

TEST(Simulate, JitterIsSeededPerRow) {
  RunConfig cfg;
  cfg.noise.reset();
  cfg.theta_grid = {0.5, 1.0};
  cfg.tomography = TomographyMode::State;
  cfg.tomography_sigma = 0.02;
  cfg.seed = 5;
  const std::string a = must_find(run_simulate(cfg), "simulate_xy.csv").content;
  EXPECT_EQ(a, must_find(run_simulate(cfg), "simulate_xy.csv").content);
  cfg.seed = 6;
  EXPECT_NE(a, must_find(run_simulate(cfg), "simulate_xy.csv").content);
}

// --- trotter-scan --------------------------------------------------------------------

TEST(TrotterScan, TableColumns) {
  RunConfig cfg = parse_config(json::parse(
      R"({"protocol": "ising", "b_over_j": 3, "initial_state": "fig3", "theta_grid": ["pi/4"], "noise": "off"})"));
  const Table t = parse_csv(must_find(run_trotter_scan(cfg), "trotter_scan.csv").content);
  ASSERT_EQ(t.rows.size(), 5u);
  const std::vector<double> predicted{0.931, 0.862, 0.794, 0.725, 0.656};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(t.rows[i][t.col("n")], static_cast<double>(i + 1));
    EXPECT_NEAR(t.rows[i][t.col("f_s_predicted")], predicted[i], 1e-3);
    EXPECT_DOUBLE_EQ(t.rows[i][t.col("fid_noisy")], t.rows[i][t.col("fid_ideal_trotter")]);
  }
  EXPECT_NEAR(t.rows[0][t.col("fid_ideal_trotter")], 0.931245344534, 1e-11);
  cfg.protocol = Protocol::XY;
  EXPECT_THROW(run_trotter_scan(cfg), ConfigError);
}

// --- tomography ------------------------------------------------------------------------

TEST(Tomography, NoiselessXYPiIsUnitFidelity) {
  RunConfig cfg;
  cfg.noise.reset();
  cfg.tomography = TomographyMode::Process;
  cfg.theta_grid = {kPi / 2, kPi};
  const RunResult r = run_tomography(cfg);
  const std::string report = must_find(r, "process_fidelity.csv").content;
  EXPECT_NE(report.find("3.14159265359,iSWAP,1\n"), std::string::npos) << report;
  EXPECT_NE(report.find("sqrt-iSWAP"), std::string::npos);
  const ChiMatrix chi = chi_from_json(json::parse(must_find(r, "chi_xy_001.json").content));
  EXPECT_NEAR(process_fidelity(chi, chi_from_unitary(circuit_unitary(compile_xy({kPi})))), 1.0, 1e-9);
}

TEST(Tomography, NoisyReferenceGates) {
  RunConfig cfg;
  cfg.tomography = TomographyMode::Process;
  cfg.theta_grid = {kPi};
  Table t = parse_csv("theta,f\n");
  std::istringstream report(must_find(run_tomography(cfg), "process_fidelity.csv").content);
  std::string header, row;
  std::getline(report, header);
  std::getline(report, row);
  EXPECT_NEAR(std::stod(row.substr(row.rfind(',') + 1)), 0.953, 0.03);
  cfg.protocol = Protocol::Heisenberg;
  cfg.theta_grid = {kPi / 2};
  std::istringstream report2(must_find(run_tomography(cfg), "process_fidelity.csv").content);
  std::getline(report2, header);
  std::getline(report2, row);
  EXPECT_NE(row.find("SWAP"), std::string::npos);
  EXPECT_NEAR(std::stod(row.substr(row.rfind(',') + 1)), 0.861, 0.05);
}

TEST(Tomography, RequiresProcessMode) {
  RunConfig cfg;
  cfg.theta_grid = {1.0};
  EXPECT_THROW(run_tomography(cfg), ConfigError);
}

// --- schedule ----------------------------------------------------------------------------

TEST(ScheduleCommand, IsingTwoStepsWritesGoldenTimeline) {
  RunConfig cfg = parse_config(json::parse(R"({"protocol": "ising", "b_over_j": 3, "n_steps": 2, "theta_grid": ["pi/2"]})"));
  const RunResult r = run_schedule(cfg, true, true);
  EXPECT_EQ(r.exit_code, kExitOk);
  std::ifstream golden(std::string(DQSIM_TEST_DATA_DIR) + "/golden/ising_theta_pi2_n2_timeline.csv", std::ios::binary);
  std::ostringstream g;
  g << golden.rdbuf();
  EXPECT_EQ(must_find(r, "timeline_000.csv").content, g.str());
  EXPECT_EQ(circuit_from_text(must_find(r, "circuit_000.txt").content), compile_ising({kPi / 2, 2, 3.0, -1}));
}

TEST(ScheduleCommand, HeisenbergHasThreeXYEvents) {
  RunConfig cfg;
  cfg.protocol = Protocol::Heisenberg;
  cfg.theta_grid = {kPi / 2};
  const std::string csv = must_find(run_schedule(cfg, false, true), "timeline_000.csv").content;
  std::size_t count = 0;
  for (std::size_t pos = csv.find(",xy\n"); pos != std::string::npos; pos = csv.find(",xy\n", pos + 1)) ++count;
  EXPECT_EQ(count, 3u);
}

TEST(ScheduleCommand, UnschedulableRefocusExitsWithValidationCode) {
  RunConfig cfg;
  cfg.protocol = Protocol::Ising;
  cfg.n_steps = 2;
  cfg.theta_grid = {kPi};
  cfg.timing.refocus = true;
  const RunResult r = run_schedule(cfg, false, true);
  EXPECT_EQ(r.exit_code, kExitValidation);
  ASSERT_EQ(r.messages.size(), 2u);
  EXPECT_NE(r.messages[0].find("refocus"), std::string::npos);
}

// --- command-line binary ---------------------------------------------------------------

TEST(Cli, ExitCodesAndOutputs) {
  const auto dir = temp_dir("cli");
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  const std::string ok = write("ok.json", R"({"protocol": "ising", "b_over_j": 3, "n_steps": 2, "theta_grid": ["pi/2"]})");
  const std::string empty = write("empty.json", R"({"theta_grid": []})");
  const std::string broken = write("broken.json", "{ not json");
  const std::string refocus =
      write("refocus.json", R"({"protocol": "ising", "n_steps": 2, "theta_grid": [1], "timing": {"refocus": true}})");
  const std::string out = (dir / "out").string();

  EXPECT_EQ(run_cli("schedule --config " + ok + " --out " + out + " --dump-timeline --dump-circuit"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "timeline_000.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "circuit_000.txt"));
  EXPECT_EQ(run_cli("simulate --config " + ok + " --out " + out + " --no-noise --gnuplot"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "simulate_ising.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "simulate_ising.gp"));
  EXPECT_EQ(run_cli("trotter-scan --config " + ok + " --out " + out + " --no-noise"), 0);
  EXPECT_EQ(run_cli("tomography --config " + ok + " --out " + out + " --seed 3"), 0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "chi_ising_000.json"));

  EXPECT_EQ(run_cli("simulate --config " + empty + " --out " + out), kExitConfig);
  EXPECT_EQ(run_cli("simulate --config " + broken + " --out " + out), kExitConfig);
  EXPECT_EQ(run_cli("simulate --config " + (dir / "missing.json").string()), kExitConfig);
  EXPECT_EQ(run_cli("frobnicate"), kExitConfig);
  EXPECT_EQ(run_cli("schedule --config " + refocus + " --out " + out), kExitValidation);
  EXPECT_EQ(run_cli("--help"), 0);
  std::filesystem::remove_all(dir);
}
