#pragma once

// Completely-positive noise engine: amplitude damping (T1), pure dephasing
// (from T1 and T2), a residual ZZ phase after every XY gate and a crosstalk
// z-phase on Q2 with every Q2 phase gate.
//
// Each gate decoheres both qubits for its full slot in the sequential pulse
// schedule: active time, the post-flux wait after flux pulses, and any
// commensurability padding inserted before the next XY gate.

#include "dqsim/circuit.hpp"
#include "dqsim/compiler.hpp"
#include "dqsim/timing.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dqsim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// ns of evolution per radian of quantum phase angle, taking |J|/2pi = 40.4 MHz:
/// tau = theta / (2 * 2pi * 40.4 MHz).
inline constexpr double kCouplingGHz = 0.0404;
inline constexpr double kThetaToNs = 1.0 / (2.0 * 2.0 * kPi * kCouplingGHz);

struct GateDurations {
  double single_qubit_ns = 24.0;
  double xy_buffer_ns = 16.0;
  double post_flux_wait_ns = 40.0;
  double phase_period_ns = 5.0;
};

struct NoiseParams {
  std::vector<double> t1_us{7.1, 6.7};
  std::vector<double> t2_us{5.4, 4.9};
  double jz_tilde_deg = 2.3;
  double crosstalk_deg = 4.6;
  GateDurations durations;
  double theta_to_ns = kThetaToNs;

  static NoiseParams device_defaults() { return {}; }

  /// No decoherence and no coherent errors; durations are kept.
  static NoiseParams ideal() {
    NoiseParams p;
    p.t1_us = {kInf, kInf};
    p.t2_us = {kInf, kInf};
    p.jz_tilde_deg = 0.0;
    p.crosstalk_deg = 0.0;
    return p;
  }

  void validate(int n_qubits) const {
    if (static_cast<int>(t1_us.size()) < n_qubits || static_cast<int>(t2_us.size()) < n_qubits) {
      throw LinalgError("NoiseParams: need T1 and T2 for every qubit");
    }
    for (int q = 0; q < n_qubits; ++q) {
      const double t1 = t1_us[static_cast<std::size_t>(q)];
      const double t2 = t2_us[static_cast<std::size_t>(q)];
      if (!(t1 > 0.0) || !(t2 > 0.0)) throw LinalgError("NoiseParams: T1 and T2 must be > 0");
      if (t2 > 2.0 * t1) throw LinalgError("NoiseParams: T2 > 2 T1 is unphysical");
    }
    if (!std::isfinite(jz_tilde_deg) || !std::isfinite(crosstalk_deg)) throw LinalgError("NoiseParams: angles must be finite");
    const auto& d = durations;
    for (double v : {d.single_qubit_ns, d.xy_buffer_ns, d.post_flux_wait_ns, theta_to_ns}) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw LinalgError("NoiseParams: durations must be finite and >= 0");
    }
    if (!(d.phase_period_ns > 0.0)) throw LinalgError("NoiseParams: phase period must be > 0");
  }
};

/// Kraus operators of amplitude damping followed by pure dephasing for one
/// qubit over `duration_ns`. Infinite T1/T2 disable the respective process.
inline std::vector<ComplexMatrix> decoherence_kraus(double duration_ns, double t1_us, double t2_us) {
  if (!(duration_ns >= 0.0)) throw LinalgError("decoherence_kraus: duration must be >= 0");
  if (!(t1_us > 0.0) || !(t2_us > 0.0)) throw LinalgError("decoherence_kraus: T1 and T2 must be > 0");
  if (t2_us > 2.0 * t1_us) throw LinalgError("decoherence_kraus: T2 > 2 T1 is unphysical");
  const double t_us = duration_ns * 1e-3;
  const double gamma = std::isinf(t1_us) ? 0.0 : -std::expm1(-t_us / t1_us);
  const double dephasing_rate = 1.0 / t2_us - 0.5 / t1_us;  // 1 / T_phi
  const double lambda = -std::expm1(-2.0 * t_us * std::max(dephasing_rate, 0.0));

  ComplexMatrix a0(2, 2), a1(2, 2), p0(2, 2), p1(2, 2);
  a0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - gamma);
  a1 << 0.0, std::sqrt(gamma), 0.0, 0.0;
  p0 << 1.0, 0.0, 0.0, std::sqrt(1.0 - lambda);
  p1 << 0.0, 0.0, 0.0, std::sqrt(lambda);

  std::vector<ComplexMatrix> out;
  for (const ComplexMatrix* p : {&p0, &p1}) {
    for (const ComplexMatrix* a : {&a0, &a1}) {
      ComplexMatrix k = (*p) * (*a);
      if (k.cwiseAbs().maxCoeff() > 0.0) out.push_back(std::move(k));
    }
  }
  return out;
}

/// Sum_k K^dagger K.
inline ComplexMatrix kraus_completeness(std::span<const ComplexMatrix> kraus) {
  if (kraus.empty()) throw LinalgError("kraus_completeness: empty Kraus list");
  ComplexMatrix sum = ComplexMatrix::Zero(kraus.front().rows(), kraus.front().cols());
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return sum;
}

/// Applies single-qubit Kraus operators to `qubit` of an n-qubit operator.
inline ComplexMatrix apply_channel(const ComplexMatrix& rho, std::span<const ComplexMatrix> kraus, int qubit,
                                   int n_qubits) {
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : kraus) {
    const ComplexMatrix big = embed(k, qubit, n_qubits);
    out += big * rho * big.adjoint();
  }
  return out;
}

/// exp(-i angle ZZ) on two qubits, angle in degrees.
inline ComplexMatrix zz_error_unitary(double angle_deg) {
  const double a = angle_deg * kPi / 180.0;
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = std::exp(-kI * a);
  u(1, 1) = std::exp(kI * a);
  u(2, 2) = std::exp(kI * a);
  u(3, 3) = std::exp(-kI * a);
  return u;
}

/// Active (pulse) duration of a gate in ns, excluding any trailing wait.
inline double active_duration_ns(const Gate& g, const CircuitMeta& meta, const NoiseParams& p) {
  switch (g.kind) {
    case GateKind::XY:
      return 2.0 * p.durations.xy_buffer_ns + p.theta_to_ns * g.theta;
    case GateKind::Rot:
      if (g.axis == Axis::Z) {
        if (auto st = meta.step_theta()) return p.theta_to_ns * *st;
      }
      return p.durations.single_qubit_ns;
    case GateKind::Wait:
      return g.wait_ns;
  }
  return 0.0;
}

/// Wall-clock slot of every gate in the sequential schedule: from its start to
/// the next gate's start (last gate: to the end of its trailing wait).
inline std::vector<double> gate_slot_durations(const Circuit& c, const NoiseParams& p) {
  std::vector<double> starts;
  starts.reserve(c.gates.size());
  double cursor = 0.0;
  std::optional<double> prev_xy;
  for (const Gate& g : c.gates) {
    double start = cursor;
    if (g.kind == GateKind::XY) {
      if (prev_xy) start += commensurate_padding(start - *prev_xy, p.durations.phase_period_ns);
      prev_xy = start;
    }
    starts.push_back(start);
    cursor = start + active_duration_ns(g, c.meta, p) + (g.is_flux() ? p.durations.post_flux_wait_ns : 0.0);
  }
  std::vector<double> slots(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    slots[i] = (i + 1 < starts.size() ? starts[i + 1] : cursor) - starts[i];
  }
  return slots;
}

/// Noisy evolution with explicit per-gate decoherence durations.
inline DensityMatrix simulate_noisy(const Circuit& c, const NoiseParams& p, const DensityMatrix& rho0,
                                    std::span<const double> slot_ns) {
  c.validate();
  p.validate(c.n_qubits);
  if (rho0.n_qubits() != c.n_qubits) throw LinalgError("simulate_noisy: state and circuit sizes differ");
  if (slot_ns.size() != c.gates.size()) throw LinalgError("simulate_noisy: one duration per gate required");

  const int n = c.n_qubits;
  const ComplexMatrix crosstalk = embed(rotation_2x2(Axis::Z, p.crosstalk_deg * kPi / 180.0), 1 % n, n);
  ComplexMatrix rho = rho0.matrix();
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    const ComplexMatrix u = gate_unitary(g, n, c.j_sign);
    rho = u * rho * u.adjoint();
    if (g.kind == GateKind::XY && p.jz_tilde_deg != 0.0) {
      const double a = p.jz_tilde_deg * kPi / 180.0;
      const ComplexMatrix zz = herm_expm(pauli_pair('Z', g.qubit, 'Z', g.qubit2, n), a);
      rho = zz * rho * zz.adjoint();
    }
    if (g.kind == GateKind::Rot && g.axis == Axis::Z && g.qubit == 1 && p.crosstalk_deg != 0.0) {
      rho = crosstalk * rho * crosstalk.adjoint();
    }
    if (slot_ns[i] > 0.0) {
      for (int q = 0; q < n; ++q) {
        const double t1 = p.t1_us[static_cast<std::size_t>(q)];
        const double t2 = p.t2_us[static_cast<std::size_t>(q)];
        if (std::isinf(t1) && std::isinf(t2)) continue;
        const auto kraus = decoherence_kraus(slot_ns[i], t1, t2);
        rho = apply_channel(rho, kraus, q, n);
      }
    }
  }
  if (!rho.allFinite()) throw NumericalError("simulate_noisy: non-finite density matrix");
  // Strip trace drift from repeated channel application.
  rho /= rho.trace().real();
  return DensityMatrix(rho);
}

inline DensityMatrix simulate_noisy(const Circuit& c, const NoiseParams& p, const DensityMatrix& rho0) {
  const auto slots = gate_slot_durations(c, p);
  return simulate_noisy(c, p, rho0, slots);
}

struct PredictedFidelity {
  double f_process;
  double f_state;
};

/// Process fidelity from composing `n_gates` independent XY errors, clamped to [0, 1].
inline double composed_process_fidelity(int n_gates, double f_p_xy) {
  return std::clamp(1.0 - n_gates * (1.0 - f_p_xy), 0.0, 1.0);
}

/// F_s = (d F_p + 1) / (d + 1).
inline double state_from_process_fidelity(double f_p, int dim = 4) {
  return (dim * f_p + 1.0) / (dim + 1.0);
}

/// Error budget of an n-step Ising simulation (two XY gates per step).
inline PredictedFidelity predicted_fidelity(int n_steps, double f_p_xy) {
  if (!(f_p_xy >= 0.0 && f_p_xy <= 1.0)) throw LinalgError("predicted_fidelity: f_p_xy must lie in [0, 1]");
  if (n_steps < 0) throw LinalgError("predicted_fidelity: n_steps must be >= 0");
  const double f_p = composed_process_fidelity(2 * n_steps, f_p_xy);
  return {f_p, state_from_process_fidelity(f_p)};
}

/// Device-averaged XY process fidelity used by the error budget.
inline constexpr double kMeasuredXyProcessFidelity = 0.957;

}  // namespace dqsim
