// dqsim: digital quantum simulation experiments on a two-qubit XY device.
//
//   dqsim simulate     --config run.json [--out DIR] [--seed N] [--no-noise] [--gnuplot]
//   dqsim trotter-scan --config run.json [--out DIR] [--no-noise]
//   dqsim tomography   --config run.json [--out DIR] [--seed N] [--no-noise]
//   dqsim schedule     --config run.json [--out DIR] [--dump-circuit] [--dump-timeline]
//
// Exit codes: 0 ok, 2 bad config / arguments, 3 numerical failure, 4 timing violation.

#include "dqsim/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool no_noise = false;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("-c,--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("-o,--out", o.out, "output directory (overrides output_path)");
  sub->add_option("--seed", o.seed, "RNG seed (overrides seed)");
  sub->add_flag("--no-noise", o.no_noise, "ignore the noise block");
}

dqsim::RunConfig load(const CommonOptions& o) {
  dqsim::RunConfig cfg = dqsim::load_config(o.config);
  if (!o.out.empty()) cfg.output_path = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.no_noise) cfg.noise.reset();
  return cfg;
}

int finish(const dqsim::RunResult& r, const dqsim::RunConfig& cfg) {
  dqsim::write_outputs(r, cfg.output_path);
  for (const auto& f : r.files) std::cout << "wrote " << (std::filesystem::path(cfg.output_path) / f.name).string() << '\n';
  for (const auto& m : r.messages) std::cerr << m << '\n';
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dqsim: digital quantum simulation of two-spin models"};
  app.require_subcommand(1);

  CommonOptions sim_o, scan_o, tomo_o, sched_o;
  bool gnuplot = false;
  bool dump_circuit = false;
  bool dump_timeline = false;

  auto* sim = app.add_subcommand("simulate", "observables vs quantum phase angle");
  add_common(sim, sim_o);
  sim->add_flag("--gnuplot", gnuplot, "also write a gnuplot script");

  auto* scan = app.add_subcommand("trotter-scan", "Ising Trotter fidelity over theta and n");
  add_common(scan, scan_o);

  auto* tomo = app.add_subcommand("tomography", "process tomography chi matrices and fidelities");
  add_common(tomo, tomo_o);

  auto* sched = app.add_subcommand("schedule", "pulse timelines and timing-rule validation");
  add_common(sched, sched_o);
  sched->add_flag("--dump-circuit", dump_circuit, "write the compiled circuit text");
  sched->add_flag("--dump-timeline", dump_timeline, "write the pulse timeline CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dqsim::kExitConfig;
  }

  try {
    if (*sim) {
      const auto cfg = load(sim_o);
      return finish(dqsim::run_simulate(cfg, gnuplot), cfg);
    }
    if (*scan) {
      const auto cfg = load(scan_o);
      return finish(dqsim::run_trotter_scan(cfg), cfg);
    }
    if (*tomo) {
      auto cfg = load(tomo_o);
      cfg.tomography = dqsim::TomographyMode::Process;
      return finish(dqsim::run_tomography(cfg), cfg);
    }
    if (*sched) {
      const auto cfg = load(sched_o);
      if (!dump_circuit && !dump_timeline) dump_timeline = true;
      return finish(dqsim::run_schedule(cfg, dump_circuit, dump_timeline), cfg);
    }
  } catch (const dqsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return dqsim::kExitConfig;
  } catch (const dqsim::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return dqsim::kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return dqsim::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
