#pragma once

// Run configuration and the experiment drivers behind the command-line tool.
// Drivers return the files they would write so they can be tested in memory.

#include "dqsim/compiler.hpp"
#include "dqsim/noise.hpp"
#include "dqsim/schedule.hpp"
#include "dqsim/tomography.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dqsim {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TomographyMode { None, State, Process };

/// Named initial states: fig2 = |up>(|up> + |down>)/sqrt2, fig3 = |up>(|up> - i|down>)/sqrt2,
/// up-up = |up up>, bell = (|up up> + |down down>)/sqrt2.
inline ComplexVector preset_state(const std::string& name) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  if (name == "fig2") {
    v(0) = r;
    v(1) = r;
  } else if (name == "fig3") {
    v(0) = r;
    v(1) = -kI * r;
  } else if (name == "up-up") {
    v(0) = 1.0;
  } else if (name == "bell") {
    v(0) = r;
    v(3) = r;
  } else {
    throw ConfigError("unknown initial_state preset '" + name + "' (expected fig2, fig3, up-up or bell)");
  }
  return v;
}

struct RunConfig {
  Protocol protocol = Protocol::XY;
  std::vector<double> theta_grid;
  int n_steps = 1;
  std::vector<int> n_list{1, 2, 3, 4, 5};
  double b_over_j = 0.0;
  int j_sign = -1;
  std::string initial_state_name = "fig2";
  ComplexVector initial_state = preset_state("fig2");
  std::optional<NoiseParams> noise = NoiseParams::device_defaults();
  TomographyMode tomography = TomographyMode::None;
  double tomography_sigma = 0.0;
  std::uint64_t seed = 1;
  std::string output_path = "out";
  TimingParams timing;
  double theta_to_ns = kThetaToNs;

  EvolutionParams params(double theta, int n) const { return {theta, n, b_over_j, j_sign}; }
  StateVector psi0() const { return StateVector::normalized(initial_state); }

  /// Noise parameters with durations synchronized to the timing block.
  std::optional<NoiseParams> effective_noise() const {
    if (!noise) return std::nullopt;
    NoiseParams p = *noise;
    p.durations.single_qubit_ns = timing.single_qubit_ns;
    p.durations.xy_buffer_ns = timing.buffer_ns;
    p.durations.post_flux_wait_ns = timing.post_flux_wait_ns;
    p.durations.phase_period_ns = timing.phase_period_ns;
    p.theta_to_ns = theta_to_ns;
    return p;
  }
};

namespace detail {

/// Parses a number or an expression of the form [k][*]pi[/m], e.g. "3pi/2".
inline double parse_angle(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(where + ": expected a number or a string like \"3pi/2\"");
  std::string s = j.get<std::string>();
  std::string compact;
  for (char c : s) {
    if (c != ' ' && c != '*') compact += c;
  }
  const auto pos = compact.find("pi");
  try {
    if (pos == std::string::npos) return std::stod(compact);
    double k = 1.0;
    const std::string head = compact.substr(0, pos);
    if (head == "-") k = -1.0;
    else if (!head.empty()) k = std::stod(head);
    double m = 1.0;
    const std::string tail = compact.substr(pos + 2);
    if (!tail.empty()) {
      if (tail[0] != '/') throw ConfigError(where + ": cannot parse angle '" + s + "'");
      m = std::stod(tail.substr(1));
    }
    return k * kPi / m;
  } catch (const std::logic_error&) {
    throw ConfigError(where + ": cannot parse angle '" + s + "'");
  }
}

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

inline std::vector<double> parse_pair(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [Q1, Q2]");
  return {get_as<double>(j[0], where), get_as<double>(j[1], where)};
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  detail::reject_unknown_keys(j,
                              {"protocol", "theta_grid", "n_steps", "n_list", "b_over_j", "j_sign", "initial_state",
                               "noise", "tomography", "tomography_sigma", "seed", "output_path", "timing",
                               "theta_to_ns"},
                              "config");
  RunConfig cfg;
  if (j.contains("protocol")) {
    try {
      cfg.protocol = parse_protocol(detail::get_as<std::string>(j["protocol"], "protocol"));
    } catch (const CircuitError& e) {
      throw ConfigError(std::string("protocol: ") + e.what());
    }
  }
  if (j.contains("theta_grid")) {
    const auto& g = j["theta_grid"];
    if (g.is_array()) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        cfg.theta_grid.push_back(detail::parse_angle(g[i], "theta_grid[" + std::to_string(i) + "]"));
      }
    } else if (g.is_object()) {
      detail::reject_unknown_keys(g, {"start", "stop", "points"}, "theta_grid");
      const double start = g.contains("start") ? detail::parse_angle(g["start"], "theta_grid.start") : 0.0;
      if (!g.contains("stop") || !g.contains("points")) throw ConfigError("theta_grid: need stop and points");
      const double stop = detail::parse_angle(g["stop"], "theta_grid.stop");
      const int points = detail::get_as<int>(g["points"], "theta_grid.points");
      if (points < 1) throw ConfigError("theta_grid: points must be >= 1");
      for (int k = 0; k < points; ++k) {
        cfg.theta_grid.push_back(points == 1 ? start : start + (stop - start) * k / (points - 1));
      }
    } else {
      throw ConfigError("theta_grid: expected a list or {start, stop, points}");
    }
  } else {
    for (int k = 0; k <= 32; ++k) cfg.theta_grid.push_back(kPi * k / 32.0);
  }
  if (j.contains("n_steps")) cfg.n_steps = detail::get_as<int>(j["n_steps"], "n_steps");
  if (j.contains("n_list")) cfg.n_list = detail::get_as<std::vector<int>>(j["n_list"], "n_list");
  if (j.contains("b_over_j")) cfg.b_over_j = detail::get_as<double>(j["b_over_j"], "b_over_j");
  if (j.contains("j_sign")) cfg.j_sign = detail::get_as<int>(j["j_sign"], "j_sign");
  if (j.contains("initial_state")) {
    const auto& s = j["initial_state"];
    if (s.is_string()) {
      cfg.initial_state_name = s.get<std::string>();
    } else if (s.is_array() && s.size() == 4) {
      cfg.initial_state_name = "custom";
      cfg.initial_state = ComplexVector(4);
      for (std::size_t k = 0; k < 4; ++k) {
        const auto& a = s[k];
        if (a.is_number()) {
          cfg.initial_state(static_cast<Eigen::Index>(k)) = a.get<double>();
        } else if (a.is_array() && a.size() == 2) {
          cfg.initial_state(static_cast<Eigen::Index>(k)) =
              Complex(detail::get_as<double>(a[0], "initial_state"), detail::get_as<double>(a[1], "initial_state"));
        } else {
          throw ConfigError("initial_state: amplitudes must be numbers or [re, im] pairs");
        }
      }
    } else {
      throw ConfigError("initial_state: expected a preset name or 4 amplitudes");
    }
  }
  if (cfg.initial_state_name != "custom") cfg.initial_state = preset_state(cfg.initial_state_name);

  if (j.contains("noise")) {
    const auto& n = j["noise"];
    if (n.is_string()) {
      const auto s = n.get<std::string>();
      if (s == "off") cfg.noise.reset();
      else if (s == "on") cfg.noise = NoiseParams::device_defaults();
      else throw ConfigError("noise: expected \"off\", \"on\" or an object");
    } else if (n.is_object()) {
      detail::reject_unknown_keys(n, {"t1_us", "t2_us", "jz_tilde_deg", "crosstalk_deg"}, "noise");
      NoiseParams p;
      if (n.contains("t1_us")) p.t1_us = detail::parse_pair(n["t1_us"], "noise.t1_us");
      if (n.contains("t2_us")) p.t2_us = detail::parse_pair(n["t2_us"], "noise.t2_us");
      if (n.contains("jz_tilde_deg")) p.jz_tilde_deg = detail::get_as<double>(n["jz_tilde_deg"], "noise.jz_tilde_deg");
      if (n.contains("crosstalk_deg")) p.crosstalk_deg = detail::get_as<double>(n["crosstalk_deg"], "noise.crosstalk_deg");
      cfg.noise = p;
    } else {
      throw ConfigError("noise: expected \"off\" or an object");
    }
  }
  if (j.contains("tomography")) {
    const auto t = detail::get_as<std::string>(j["tomography"], "tomography");
    if (t == "none") cfg.tomography = TomographyMode::None;
    else if (t == "state") cfg.tomography = TomographyMode::State;
    else if (t == "process") cfg.tomography = TomographyMode::Process;
    else throw ConfigError("tomography: expected none, state or process");
  }
  if (j.contains("tomography_sigma")) cfg.tomography_sigma = detail::get_as<double>(j["tomography_sigma"], "tomography_sigma");
  if (j.contains("seed")) cfg.seed = detail::get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("output_path")) cfg.output_path = detail::get_as<std::string>(j["output_path"], "output_path");
  if (j.contains("theta_to_ns")) cfg.theta_to_ns = detail::get_as<double>(j["theta_to_ns"], "theta_to_ns");
  if (j.contains("timing")) {
    const auto& t = j["timing"];
    detail::reject_unknown_keys(t, {"single_qubit_ns", "buffer_ns", "post_flux_wait_ns", "detuning_mhz", "refocus"},
                                "timing");
    if (t.contains("single_qubit_ns")) cfg.timing.single_qubit_ns = detail::get_as<double>(t["single_qubit_ns"], "timing");
    if (t.contains("buffer_ns")) cfg.timing.buffer_ns = detail::get_as<double>(t["buffer_ns"], "timing");
    if (t.contains("post_flux_wait_ns")) cfg.timing.post_flux_wait_ns = detail::get_as<double>(t["post_flux_wait_ns"], "timing");
    if (t.contains("detuning_mhz")) cfg.timing.detuning_mhz = detail::get_as<double>(t["detuning_mhz"], "timing");
    if (t.contains("refocus")) cfg.timing.refocus = detail::get_as<bool>(t["refocus"], "timing");
    cfg.timing.phase_period_ns = 1000.0 / cfg.timing.detuning_mhz;
  }
  return cfg;
}

/// Checks the invariants every command relies on.
inline void validate_config(const RunConfig& cfg) {
  if (cfg.theta_grid.empty()) throw ConfigError("theta_grid must not be empty");
  for (std::size_t i = 0; i < cfg.theta_grid.size(); ++i) {
    const double t = cfg.theta_grid[i];
    if (!std::isfinite(t) || t < 0.0) throw ConfigError("theta_grid values must be finite and >= 0");
    if (i > 0 && !(t > cfg.theta_grid[i - 1])) throw ConfigError("theta_grid must be strictly ascending");
  }
  if (cfg.n_steps < 1) throw ConfigError("n_steps must be >= 1");
  for (int n : cfg.n_list) {
    if (n < 1) throw ConfigError("n_list entries must be >= 1");
  }
  if (!std::isfinite(cfg.b_over_j)) throw ConfigError("b_over_j must be finite");
  if (cfg.j_sign != 1 && cfg.j_sign != -1) throw ConfigError("j_sign must be +1 or -1");
  if (cfg.initial_state.size() != 4 || !(cfg.initial_state.norm() > 0.0)) {
    throw ConfigError("initial_state must have 4 amplitudes and nonzero norm");
  }
  if (!(cfg.tomography_sigma >= 0.0)) throw ConfigError("tomography_sigma must be >= 0");
  if (!(cfg.theta_to_ns >= 0.0) || !std::isfinite(cfg.theta_to_ns)) throw ConfigError("theta_to_ns must be finite and >= 0");
  if (!(cfg.timing.detuning_mhz > 0.0)) throw ConfigError("timing.detuning_mhz must be > 0");
  if (auto p = cfg.effective_noise()) {
    try {
      p->validate(2);
    } catch (const LinalgError& e) {
      throw ConfigError(std::string("noise: ") + e.what());
    }
  }
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

// ---------------------------------------------------------------------------
// Drivers

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunResult {
  int exit_code = 0;
  std::vector<OutputFile> files;
  std::vector<std::string> messages;

  const OutputFile* find(const std::string& name) const {
    for (const auto& f : files) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitValidation = 4;

namespace detail {

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i])) throw NumericalError("non-finite value in CSV output");
      out_ << (i ? "," : "") << format_csv_number(values[i]);
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline std::vector<double> observables(const DensityMatrix& rho, const StateVector& exact) {
  const int n = 2;
  std::vector<double> v;
  for (int q = 0; q < n; ++q) {
    for (char a : {'X', 'Y', 'Z'}) v.push_back(expectation(rho, embed(pauli::from_char(a), q, n)));
  }
  v.push_back(expectation(rho, pauli_string("XX")));
  v.push_back(negativity(rho));
  v.push_back(state_fidelity(rho, exact));
  return v;
}

inline const std::vector<std::string>& observable_columns() {
  static const std::vector<std::string> cols{"sx1", "sy1", "sz1", "sx2", "sy2", "sz2", "xx_corr", "negativity",
                                             "fid_vs_exact"};
  return cols;
}

inline std::string index_name(const std::string& stem, std::size_t k, const std::string& ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03zu", k);
  return stem + "_" + buf + ext;
}

}  // namespace detail

/// Bloch components, XX correlation, negativity and fidelity to the exact
/// evolution per theta, ideal and (optionally) noisy / tomographically reconstructed.
inline RunResult run_simulate(const RunConfig& cfg, bool gnuplot = false) {
  validate_config(cfg);
  const auto noise = cfg.effective_noise();
  const bool tomo = cfg.tomography == TomographyMode::State;

  std::vector<std::string> header{"theta"};
  for (const auto& c : detail::observable_columns()) header.push_back(c);
  if (noise) {
    for (const auto& c : detail::observable_columns()) header.push_back("noisy_" + c);
  }
  if (tomo) {
    for (const auto& c : detail::observable_columns()) header.push_back("tomo_" + c);
  }
  detail::CsvWriter csv(header);

  const StateVector psi0 = cfg.psi0();
  const DensityMatrix rho0(psi0);
  for (std::size_t row = 0; row < cfg.theta_grid.size(); ++row) {
    const double theta = cfg.theta_grid[row];
    const EvolutionParams p = cfg.params(theta, cfg.n_steps);
    const Circuit c = compile(cfg.protocol, p);
    const StateVector exact(exact_unitary(cfg.protocol, p) * psi0.amplitudes());
    const DensityMatrix ideal(psi0.evolved(circuit_unitary(c)));

    std::vector<double> values{theta};
    for (double v : detail::observables(ideal, exact)) values.push_back(v);
    std::optional<DensityMatrix> noisy;
    if (noise) {
      noisy = simulate_noisy(c, *noise, rho0);
      for (double v : detail::observables(*noisy, exact)) values.push_back(v);
    }
    if (tomo) {
      const auto rec = synthesize_measurements(noisy ? *noisy : ideal, cfg.tomography_sigma, cfg.seed + row);
      for (double v : detail::observables(reconstruct_state(rec), exact)) values.push_back(v);
    }
    csv.row(values);
  }

  RunResult result;
  const std::string name = std::string("simulate_") + to_string(cfg.protocol);
  result.files.push_back({name + ".csv", csv.str()});
  if (gnuplot) {
    std::ostringstream gp;
    gp << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 'quantum phase angle 2|J|tau'\n"
       << "plot for [col=2:8] '" << name << ".csv' using 1:col with lines\n";
    result.files.push_back({name + ".gp", gp.str()});
  }
  return result;
}

/// Ising Trotter fidelities over a (theta, n) grid.
inline RunResult run_trotter_scan(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.protocol != Protocol::Ising) throw ConfigError("trotter-scan requires protocol \"ising\"");
  if (cfg.n_list.empty()) throw ConfigError("n_list must not be empty");
  const auto noise = cfg.effective_noise();
  const StateVector psi0 = cfg.psi0();
  const DensityMatrix rho0(psi0);

  detail::CsvWriter csv({"theta", "n", "fid_ideal_trotter", "fid_noisy", "f_s_predicted"});
  for (double theta : cfg.theta_grid) {
    for (int n : cfg.n_list) {
      const EvolutionParams p = cfg.params(theta, n);
      const double ideal = trotter_fidelity(p, psi0);
      double noisy_fid = ideal;
      if (noise) {
        const StateVector exact(exact_unitary(Protocol::Ising, p) * psi0.amplitudes());
        noisy_fid = state_fidelity(simulate_noisy(compile_ising(p), *noise, rho0), exact);
      }
      csv.row({theta, static_cast<double>(n), ideal, noisy_fid,
               predicted_fidelity(n, kMeasuredXyProcessFidelity).f_state});
    }
  }
  RunResult result;
  result.files.push_back({"trotter_scan.csv", csv.str()});
  return result;
}

/// Name of the ideal process a protocol realizes at theta, for reporting.
inline std::string ideal_target_name(Protocol protocol, double theta) {
  auto near = [&](double v) { return std::abs(theta - v) < 1e-12; };
  if (protocol == Protocol::XY) {
    if (near(kPi)) return "iSWAP";
    if (near(kPi / 2)) return "sqrt-iSWAP";
  }
  if (protocol == Protocol::Heisenberg) {
    if (near(kPi / 2)) return "SWAP";
    if (near(kPi)) return "identity";
  }
  if (near(0.0)) return "identity";
  return "ideal-circuit";
}

/// Chi matrices (ideal or noisy channel) and process fidelity vs the ideal circuit.
inline RunResult run_tomography(const RunConfig& cfg) {
  validate_config(cfg);
  if (cfg.tomography != TomographyMode::Process) throw ConfigError("tomography command requires tomography = \"process\"");
  const auto noise = cfg.effective_noise();

  RunResult result;
  std::ostringstream report;
  report << "theta,target,process_fidelity\n";
  for (std::size_t k = 0; k < cfg.theta_grid.size(); ++k) {
    const double theta = cfg.theta_grid[k];
    const Circuit c = compile(cfg.protocol, cfg.params(theta, cfg.n_steps));
    const ComplexMatrix u = circuit_unitary(c);
    std::uint64_t draw = 0;
    auto channel = [&](const DensityMatrix& rho) {
      DensityMatrix out = noise ? simulate_noisy(c, *noise, rho) : rho.conjugated(u);
      if (cfg.tomography_sigma > 0.0) {
        out = reconstruct_state(synthesize_measurements(out, cfg.tomography_sigma, cfg.seed + 16 * k + draw++));
      }
      return out;
    };
    const ChiMatrix chi = process_tomography(channel);
    const double f = process_fidelity(chi, chi_from_unitary(u));
    if (!std::isfinite(f)) throw NumericalError("non-finite process fidelity");
    report << detail::format_csv_number(theta) << ',' << ideal_target_name(cfg.protocol, theta) << ','
           << detail::format_csv_number(f) << '\n';
    result.files.push_back({detail::index_name(std::string("chi_") + to_string(cfg.protocol), k, ".json"),
                            chi_to_json(chi).dump(2) + "\n"});
  }
  result.files.push_back({"process_fidelity.csv", report.str()});
  return result;
}

/// Circuit text and pulse timeline per theta; exit 4 on timing-rule violations.
inline RunResult run_schedule(const RunConfig& cfg, bool dump_circuit, bool dump_timeline) {
  validate_config(cfg);
  if (!cfg.timing.consistent()) throw ConfigError("timing: phase period inconsistent with detuning");
  RunResult result;
  for (std::size_t k = 0; k < cfg.theta_grid.size(); ++k) {
    const Circuit c = compile(cfg.protocol, cfg.params(cfg.theta_grid[k], cfg.n_steps));
    const PulseTimeline tl = schedule(c, cfg.timing, cfg.theta_to_ns);
    if (dump_circuit) result.files.push_back({detail::index_name("circuit", k, ".txt"), to_text(c)});
    if (dump_timeline) result.files.push_back({detail::index_name("timeline", k, ".csv"), timeline_csv(tl)});
    for (const auto& v : validate(tl, cfg.timing)) {
      result.messages.push_back("theta=" + detail::format_csv_number(cfg.theta_grid[k]) + ": " + to_string(v));
    }
  }
  if (!result.messages.empty()) result.exit_code = kExitValidation;
  return result;
}

inline void write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : r.files) {
    std::ofstream out(dir / f.name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + (dir / f.name).string() + "'");
    out << f.content;
  }
}

}  // namespace dqsim
