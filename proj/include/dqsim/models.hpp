#pragma once

// Spin-model Hamiltonians and the exact-evolution oracle.
//
// Everything is dimensionless: couplings in units of |J|, time expressed as the
// quantum phase angle theta = 2|J|tau, so a Hamiltonian in |J| units is evolved
// for t = tau = theta / 2.

#include "dqsim/linalg.hpp"

#include <set>
#include <utility>
#include <vector>

namespace dqsim {

enum class ModelKind { XY, XYZ, Ising };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::XY: return "XY";
    case ModelKind::XYZ: return "XYZ";
    case ModelKind::Ising: return "ISING";
  }
  return "?";
}

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SpinModelSpec {
  ModelKind kind = ModelKind::XY;
  int n_spins = 2;
  std::vector<std::pair<int, int>> pairs{{0, 1}};
  double jx = 1.0;
  double jy = 1.0;
  double jz = 1.0;
  double b = 0.0;
  int j_sign = -1;  // device coupling is J = -40.4 MHz

  void validate() const {
    if (n_spins < 2) throw ModelError("SpinModelSpec: n_spins must be >= 2");
    if (j_sign != 1 && j_sign != -1) throw ModelError("SpinModelSpec: j_sign must be +1 or -1");
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : pairs) {
      if (i == j) throw ModelError("SpinModelSpec: pair with identical indices");
      if (i < 0 || j < 0 || i >= n_spins || j >= n_spins) {
        throw ModelError("SpinModelSpec: pair index out of range");
      }
      if (!seen.insert(std::minmax(i, j)).second) throw ModelError("SpinModelSpec: duplicate pair");
    }
  }

  static SpinModelSpec two_spin_xy(double j = 1.0, int sign = -1) {
    SpinModelSpec s;
    s.kind = ModelKind::XY;
    s.jx = j;
    s.jy = j;
    s.jz = 0.0;
    s.j_sign = sign;
    return s;
  }

  static SpinModelSpec two_spin_heisenberg(double j = 1.0, int sign = -1) {
    SpinModelSpec s;
    s.kind = ModelKind::XYZ;
    s.jx = s.jy = s.jz = j;
    s.j_sign = sign;
    return s;
  }

  static SpinModelSpec two_spin_ising(double j, double field, int sign = -1) {
    SpinModelSpec s;
    s.kind = ModelKind::Ising;
    s.jx = j;
    s.jy = s.jz = 0.0;
    s.b = field;
    s.j_sign = sign;
    return s;
  }
};

namespace detail {

inline void require_kind(const SpinModelSpec& spec, ModelKind kind, const char* op) {
  spec.validate();
  if (spec.kind != kind) {
    throw ModelError(std::string(op) + ": spec kind is " + to_string(spec.kind) + ", expected " + to_string(kind));
  }
}

inline ComplexMatrix zero_operator(int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  return ComplexMatrix::Zero(d, d);
}

}  // namespace detail

/// Sum over pairs of (J/2)(X_i X_j + Y_i Y_j), J = j_sign * jx.
inline ComplexMatrix build_xy(const SpinModelSpec& spec) {
  detail::require_kind(spec, ModelKind::XY, "build_xy");
  const double j = spec.j_sign * spec.jx;
  ComplexMatrix h = detail::zero_operator(spec.n_spins);
  for (auto [a, b] : spec.pairs) {
    h += 0.5 * j * (pauli_pair('X', a, 'X', b, spec.n_spins) + pauli_pair('Y', a, 'Y', b, spec.n_spins));
  }
  return h;
}

/// Sum over pairs of Jx XX + Jy YY + Jz ZZ, each coupling scaled by j_sign.
inline ComplexMatrix build_heisenberg(const SpinModelSpec& spec) {
  detail::require_kind(spec, ModelKind::XYZ, "build_heisenberg");
  const int n = spec.n_spins;
  ComplexMatrix h = detail::zero_operator(n);
  for (auto [a, b] : spec.pairs) {
    h += spec.j_sign * (spec.jx * pauli_pair('X', a, 'X', b, n) + spec.jy * pauli_pair('Y', a, 'Y', b, n) +
                        spec.jz * pauli_pair('Z', a, 'Z', b, n));
  }
  return h;
}

/// J sum_pairs X_i X_j + (B/2) sum_i Z_i with J = j_sign * jx.
inline ComplexMatrix build_ising(const SpinModelSpec& spec) {
  detail::require_kind(spec, ModelKind::Ising, "build_ising");
  const int n = spec.n_spins;
  const double j = spec.j_sign * spec.jx;
  ComplexMatrix h = detail::zero_operator(n);
  for (auto [a, b] : spec.pairs) h += j * pauli_pair('X', a, 'X', b, n);
  for (int q = 0; q < n; ++q) h += 0.5 * spec.b * embed(pauli::z(), q, n);
  return h;
}

inline ComplexMatrix build_hamiltonian(const SpinModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::XY: return build_xy(spec);
    case ModelKind::XYZ: return build_heisenberg(spec);
    case ModelKind::Ising: return build_ising(spec);
  }
  throw ModelError("build_hamiltonian: unknown kind");
}

/// herm_expm(h, t) psi0.
inline StateVector exact_evolve(const ComplexMatrix& h, double t, const StateVector& psi0) {
  if (h.rows() != psi0.dim()) throw LinalgError("exact_evolve: dimension mismatch");
  return StateVector(herm_expm(h, t) * psi0.amplitudes());
}

/// Evolution time (in 1/|J|) for a quantum phase angle.
inline constexpr double phase_angle_to_time(double theta) { return 0.5 * theta; }

}  // namespace dqsim
