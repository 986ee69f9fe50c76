#pragma once

// Digital decompositions onto the XY gate set.
//
// Heisenberg: XY(theta), then XZ and YZ blocks obtained by conjugating XY(theta)
// with basis rotations on both qubits. The three generators commute for two
// spins, so a single step is exact.
//
// Ising: n repetitions of XY(theta/n), Rx(pi) XY(theta/n) Rx(pi) on Q1, and
// Rz(B tau/n) on both qubits. The two XY halves sum to J XX.

#include "dqsim/circuit.hpp"
#include "dqsim/models.hpp"

namespace dqsim {

struct EvolutionParams {
  double theta = 0.0;   // total quantum phase angle 2|J|tau
  int n_steps = 1;
  double b_over_j = 0.0;
  int j_sign = -1;

  void validate() const {
    if (!std::isfinite(theta) || theta < 0.0) throw CircuitError("EvolutionParams: theta must be finite and >= 0");
    if (n_steps < 1) throw CircuitError("EvolutionParams: n_steps must be >= 1");
    if (!std::isfinite(b_over_j)) throw CircuitError("EvolutionParams: b_over_j must be finite");
    if (j_sign != 1 && j_sign != -1) throw CircuitError("EvolutionParams: j_sign must be +1 or -1");
  }
};

/// Single XY(theta) gate, the gate-characterization protocol.
inline Circuit compile_xy(const EvolutionParams& p) {
  p.validate();
  Circuit c;
  c.j_sign = p.j_sign;
  c.meta = {"xy", p.theta, 1, p.b_over_j};
  c.gates.push_back(Gate::xy(p.theta));
  return c;
}

inline Circuit compile_heisenberg(const EvolutionParams& p) {
  p.validate();
  constexpr double half_pi = kPi / 2.0;
  Circuit c;
  c.j_sign = p.j_sign;
  c.meta = {"heisenberg", p.theta, 1, p.b_over_j};
  auto& g = c.gates;
  g.push_back(Gate::xy(p.theta));
  // XZ block: Rx(pi/2) maps Y -> Z on both qubits.
  g.push_back(Gate::rx(half_pi, 0));
  g.push_back(Gate::rx(half_pi, 1));
  g.push_back(Gate::xy(p.theta));
  g.push_back(Gate::rx(-half_pi, 0));
  g.push_back(Gate::rx(-half_pi, 1));
  // YZ block: Ry(pi/2) maps X -> Z on both qubits.
  g.push_back(Gate::ry(half_pi, 0));
  g.push_back(Gate::ry(half_pi, 1));
  g.push_back(Gate::xy(p.theta));
  g.push_back(Gate::ry(-half_pi, 0));
  g.push_back(Gate::ry(-half_pi, 1));
  return c;
}

/// Per-step z-rotation angle B tau / n with tau = theta / 2.
inline double ising_field_angle_per_step(const EvolutionParams& p) {
  return p.b_over_j * phase_angle_to_time(p.theta) / p.n_steps;
}

inline constexpr std::size_t kIsingGatesPerStep = 6;

inline Circuit compile_ising(const EvolutionParams& p) {
  p.validate();
  Circuit c;
  c.j_sign = p.j_sign;
  c.meta = {"ising", p.theta, p.n_steps, p.b_over_j};
  const double step_theta = p.theta / p.n_steps;
  const double phi = ising_field_angle_per_step(p);
  c.gates.reserve(kIsingGatesPerStep * static_cast<std::size_t>(p.n_steps));
  for (int s = 0; s < p.n_steps; ++s) {
    c.gates.push_back(Gate::xy(step_theta));
    c.gates.push_back(Gate::rx(kPi, 0));
    c.gates.push_back(Gate::xy(step_theta));
    c.gates.push_back(Gate::rx(kPi, 0));
    c.gates.push_back(Gate::rz(phi, 0));
    c.gates.push_back(Gate::rz(phi, 1));
  }
  return c;
}

enum class Protocol { XY, Heisenberg, Ising };

inline Protocol parse_protocol(const std::string& s) {
  if (s == "xy") return Protocol::XY;
  if (s == "heisenberg") return Protocol::Heisenberg;
  if (s == "ising") return Protocol::Ising;
  throw CircuitError("unknown protocol '" + s + "'");
}

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::XY: return "xy";
    case Protocol::Heisenberg: return "heisenberg";
    case Protocol::Ising: return "ising";
  }
  return "?";
}

inline Circuit compile(Protocol protocol, const EvolutionParams& p) {
  switch (protocol) {
    case Protocol::XY: return compile_xy(p);
    case Protocol::Heisenberg: return compile_heisenberg(p);
    case Protocol::Ising: return compile_ising(p);
  }
  throw CircuitError("compile: unknown protocol");
}

/// The two-spin model a protocol simulates, in units of |J|.
inline SpinModelSpec target_model(Protocol protocol, const EvolutionParams& p) {
  switch (protocol) {
    case Protocol::XY: return SpinModelSpec::two_spin_xy(1.0, p.j_sign);
    case Protocol::Heisenberg: return SpinModelSpec::two_spin_heisenberg(1.0, p.j_sign);
    case Protocol::Ising: return SpinModelSpec::two_spin_ising(1.0, p.b_over_j, p.j_sign);
  }
  throw CircuitError("target_model: unknown protocol");
}

/// Exact target evolution exp(-i H tau) for the protocol's model.
inline ComplexMatrix exact_unitary(Protocol protocol, const EvolutionParams& p) {
  return herm_expm(build_hamiltonian(target_model(protocol, p)), phase_angle_to_time(p.theta));
}

/// |<psi_exact(theta)| U_trotter |psi0>|^2 for the Ising protocol.
inline double trotter_fidelity(const EvolutionParams& p, const StateVector& psi0) {
  const ComplexMatrix h = build_ising(target_model(Protocol::Ising, p));
  const StateVector exact = exact_evolve(h, phase_angle_to_time(p.theta), psi0);
  const StateVector trotter = psi0.evolved(circuit_unitary(compile_ising(p)));
  return overlap_fidelity(exact, trotter);
}

}  // namespace dqsim
