#pragma once

// Dense complex linear algebra for few-qubit Hilbert spaces (dim = 2^N, N <= ~6).
//
// Qubit 0 (the device's Q1) is the most significant tensor factor.
// |up> == |0> == (1, 0) and sigma_z |up> = +|up>.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Fixed tolerances.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-8;

/// Thrown for malformed input (wrong dimension, non-Hermitian operator, ...).
class LinalgError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation produces a non-finite or otherwise unusable value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

inline int qubit_count(Eigen::Index dim) {
  if (!is_power_of_two(dim)) {
    throw LinalgError("dimension " + std::to_string(dim) + " is not a power of two");
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw LinalgError(std::string(what) + ": matrix is not square");
  }
}

/// Largest entrywise |M - M^dagger|.
inline double max_asymmetry(const ComplexMatrix& m) {
  require_square(m, "max_asymmetry");
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const ComplexMatrix& m, double tol = kHermitianTol) {
  return m.rows() == m.cols() && max_asymmetry(m) <= tol;
}

/// max |U^dagger U - I|.
inline double unitarity_error(const ComplexMatrix& u) {
  require_square(u, "unitarity_error");
  return (u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

inline bool is_unitary(const ComplexMatrix& u, double tol = kUnitaryTol) {
  return u.rows() == u.cols() && unitarity_error(u) <= tol;
}

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }

inline ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

/// Single-qubit Pauli by letter: 'I', 'X', 'Y', 'Z' (case-insensitive).
inline ComplexMatrix from_char(char c) {
  switch (c) {
    case 'I': case 'i': return identity();
    case 'X': case 'x': return x();
    case 'Y': case 'y': return y();
    case 'Z': case 'z': return z();
    default: throw LinalgError(std::string("unknown Pauli letter '") + c + "'");
  }
}

}  // namespace pauli

/// Tensor product with `a` as the more significant factor.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_square(a, "kron");
  require_square(b, "kron");
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  ComplexMatrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

inline ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

/// Embed a single-qubit operator acting on `qubit` into an n-qubit register.
inline ComplexMatrix embed(const ComplexMatrix& op, int qubit, int n_qubits) {
  if (op.rows() != 2 || op.cols() != 2) throw LinalgError("embed: operator must be 2x2");
  if (qubit < 0 || qubit >= n_qubits) {
    throw LinalgError("embed: qubit index " + std::to_string(qubit) + " out of range");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n_qubits; ++q) {
    out = kron(out, q == qubit ? op : pauli::identity());
  }
  return out;
}

/// Pauli string such as "XZ" (leftmost letter acts on qubit 0).
inline ComplexMatrix pauli_string(const std::string& label) {
  if (label.empty()) throw LinalgError("pauli_string: empty label");
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char c : label) out = kron(out, pauli::from_char(c));
  return out;
}

/// Two-site Pauli product sigma^a_i sigma^b_j on n qubits.
inline ComplexMatrix pauli_pair(char a, int i, char b, int j, int n_qubits) {
  return embed(pauli::from_char(a), i, n_qubits) * embed(pauli::from_char(b), j, n_qubits);
}

/// Eigendecomposition of a Hermitian matrix, ascending eigenvalues.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};

inline HermitianEigen eigh(const ComplexMatrix& h) {
  require_square(h, "eigh");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eigh: eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline RealVector eigenvalues_hermitian(const ComplexMatrix& h) { return eigh(h).values; }

/// exp(-i h t) for Hermitian h via eigendecomposition.
inline ComplexMatrix herm_expm(const ComplexMatrix& h, double t) {
  require_square(h, "herm_expm");
  const double asym = max_asymmetry(h);
  if (asym > kHermitianTol) {
    std::ostringstream msg;
    msg << "herm_expm: input is not Hermitian (max asymmetry " << asym << ")";
    throw LinalgError(msg.str());
  }
  // Symmetrize away rounding residue before handing to the solver.
  const ComplexMatrix hs = 0.5 * (h + h.adjoint());
  const HermitianEigen e = eigh(hs);
  ComplexVector phases(e.values.size());
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    phases(k) = std::exp(-kI * e.values(k) * t);
  }
  return e.vectors * phases.asDiagonal() * e.vectors.adjoint();
}

/// Normalized pure state of N qubits.
class StateVector {
 public:
  explicit StateVector(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
    qubit_count(amps_.size());
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > kNormTol) {
      std::ostringstream msg;
      msg << "StateVector: norm " << norm << " differs from 1";
      throw LinalgError(msg.str());
    }
  }

  /// Normalizes the given amplitudes; rejects the zero vector.
  static StateVector normalized(const ComplexVector& amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw LinalgError("StateVector: cannot normalize");
    return StateVector(amplitudes / norm);
  }

  /// Computational basis state |index> on n qubits.
  static StateVector basis(int n_qubits, Eigen::Index index) {
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_qubits);
    if (index < 0 || index >= v.size()) throw LinalgError("StateVector::basis: index out of range");
    v(index) = 1.0;
    return StateVector(std::move(v));
  }

  const ComplexVector& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }
  int n_qubits() const { return qubit_count(amps_.size()); }

  StateVector evolved(const ComplexMatrix& u) const {
    if (u.rows() != dim() || u.cols() != dim()) throw LinalgError("StateVector::evolved: dimension mismatch");
    return StateVector::normalized(u * amps_);
  }

  ComplexMatrix projector() const { return amps_ * amps_.adjoint(); }

 private:
  ComplexVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite operator on N qubits.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    require_square(rho_, "DensityMatrix");
    qubit_count(rho_.rows());
    const double asym = max_asymmetry(rho_);
    if (asym > kTraceTol) {
      throw LinalgError("DensityMatrix: not Hermitian (max asymmetry " + std::to_string(asym) + ")");
    }
    rho_ = 0.5 * (rho_ + rho_.adjoint());
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol) {
      throw LinalgError("DensityMatrix: trace " + std::to_string(tr) + " differs from 1");
    }
    const double min_eig = eigenvalues_hermitian(rho_).minCoeff();
    if (min_eig < -kPsdTol) {
      throw LinalgError("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
    }
  }

  explicit DensityMatrix(const StateVector& psi) : rho_(psi.projector()) {}

  static DensityMatrix maximally_mixed(int n_qubits) {
    const Eigen::Index d = Eigen::Index{1} << n_qubits;
    return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
  }

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  int n_qubits() const { return qubit_count(rho_.rows()); }

  DensityMatrix conjugated(const ComplexMatrix& u) const {
    if (u.rows() != dim() || u.cols() != dim()) throw LinalgError("DensityMatrix::conjugated: dimension mismatch");
    return DensityMatrix(u * rho_ * u.adjoint());
  }

 private:
  ComplexMatrix rho_;
};

namespace detail {

inline double checked_real(Complex value, const char* what) {
  if (std::abs(value.imag()) > 1e-10) {
    std::ostringstream msg;
    msg << what << ": imaginary residue " << value.imag() << " exceeds 1e-10";
    throw NumericalError(msg.str());
  }
  return value.real();
}

}  // namespace detail

/// <psi| obs |psi>.
inline double expectation(const StateVector& psi, const ComplexMatrix& obs) {
  if (obs.rows() != psi.dim() || obs.cols() != psi.dim()) {
    throw LinalgError("expectation: dimension mismatch");
  }
  return detail::checked_real(psi.amplitudes().dot(obs * psi.amplitudes()), "expectation");
}

/// Tr(rho obs).
inline double expectation(const DensityMatrix& rho, const ComplexMatrix& obs) {
  if (obs.rows() != rho.dim() || obs.cols() != rho.dim()) {
    throw LinalgError("expectation: dimension mismatch");
  }
  return detail::checked_real((rho.matrix() * obs).trace(), "expectation");
}

/// Partial transpose of a two-qubit operator on subsystem 0 or 1.
inline ComplexMatrix partial_transpose(const ComplexMatrix& rho, int subsystem) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw LinalgError("partial_transpose: only two-qubit (4x4) input is supported");
  }
  if (subsystem != 0 && subsystem != 1) throw LinalgError("partial_transpose: subsystem must be 0 or 1");
  ComplexMatrix out(4, 4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          // rho[(a b), (c d)] with a, c on qubit 0 and b, d on qubit 1.
          const Complex v = rho(2 * a + b, 2 * c + d);
          if (subsystem == 0) {
            out(2 * c + b, 2 * a + d) = v;
          } else {
            out(2 * a + d, 2 * c + b) = v;
          }
        }
      }
    }
  }
  return out;
}

inline ComplexMatrix partial_transpose(const DensityMatrix& rho, int subsystem) {
  return partial_transpose(rho.matrix(), subsystem);
}

/// Global-phase-insensitive distance: min over phi of max|A - e^{i phi} B|,
/// with phi fixed by arg tr(B^dagger A).
inline double phase_gauged_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw LinalgError("phase_gauged_distance: shape mismatch");
  const Complex overlap = (b.adjoint() * a).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  return (a - phase * b).cwiseAbs().maxCoeff();
}

/// |<a|b>|^2.
inline double overlap_fidelity(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw LinalgError("overlap_fidelity: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

}  // namespace dqsim
