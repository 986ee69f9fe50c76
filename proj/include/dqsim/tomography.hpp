#pragma once

// Two-qubit state and process tomography, fidelities and negativity.
//
// Process matrices use the operator basis {I, X, Yt = -i sigma_y, Z}^{x2}:
//   E(rho) = sum_mn chi_mn E_m rho E_n^dagger,  Tr chi = 1 for trace-preserving E.

#include "dqsim/linalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace dqsim {

class TomographyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "II", "IX", ..., "ZZ"; first letter acts on Q1.
inline const std::array<std::string, 16>& two_qubit_pauli_labels() {
  static const std::array<std::string, 16> labels = [] {
    std::array<std::string, 16> out;
    const char letters[] = {'I', 'X', 'Y', 'Z'};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) out[static_cast<std::size_t>(4 * a + b)] = std::string{letters[a], letters[b]};
    }
    return out;
  }();
  return labels;
}

struct TomographyRecord {
  std::vector<std::string> pauli_labels;
  std::vector<double> expectations;
  double noise_sigma = 0.0;

  double at(const std::string& label) const {
    for (std::size_t i = 0; i < pauli_labels.size(); ++i) {
      if (pauli_labels[i] == label) return expectations[i];
    }
    throw TomographyError("TomographyRecord: no entry for '" + label + "'");
  }
};

/// Tr(rho P) for every two-qubit Pauli string plus Gaussian jitter N(0, sigma);
/// the identity entry is exact. Deterministic for a given seed.
inline TomographyRecord synthesize_measurements(const DensityMatrix& rho, double noise_sigma, std::uint64_t seed) {
  if (rho.dim() != 4) throw TomographyError("synthesize_measurements: two-qubit state required");
  if (!(noise_sigma >= 0.0)) throw TomographyError("synthesize_measurements: noise_sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
  TomographyRecord rec;
  rec.noise_sigma = noise_sigma;
  for (const auto& label : two_qubit_pauli_labels()) {
    double value = expectation(rho, pauli_string(label));
    if (label != "II" && noise_sigma > 0.0) value += jitter(rng);
    rec.pauli_labels.push_back(label);
    rec.expectations.push_back(value);
  }
  return rec;
}

/// Frobenius-nearest unit-trace positive semidefinite matrix to a Hermitian m
/// (eigenvalues projected onto the probability simplex).
inline ComplexMatrix project_to_density(const ComplexMatrix& m) {
  const HermitianEigen e = eigh(0.5 * (m + m.adjoint()));
  std::vector<double> mu(e.values.data(), e.values.data() + e.values.size());
  std::vector<double> sorted = mu;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) shift = candidate;
  }
  RealVector lambda(e.values.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) lambda(k) = std::max(e.values(k) - shift, 0.0);
  return e.vectors * lambda.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

/// Linear inversion rho = (1/4) sum <P> P, then projection onto density matrices.
inline DensityMatrix reconstruct_state(const TomographyRecord& rec) {
  const auto& labels = two_qubit_pauli_labels();
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  for (const auto& label : labels) {
    const double value = label == "II" ? 1.0 : rec.at(label);
    rho += value * pauli_string(label);
  }
  rho /= 4.0;
  return DensityMatrix(project_to_density(rho));
}

/// <psi| rho |psi>.
inline double state_fidelity(const DensityMatrix& rho, const StateVector& target) {
  return std::clamp(expectation(rho, target.projector()), 0.0, 1.0);
}

/// Sum of |negative eigenvalues| of the partial transpose, (||rho^T1||_1 - 1) / 2.
inline double negativity(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw TomographyError("negativity: two-qubit state required");
  const RealVector ev = eigenvalues_hermitian(partial_transpose(rho, 0));
  double sum = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < 0.0) sum -= ev(k);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Process tomography

/// Single-qubit chi basis {I, X, -i sigma_y, Z}.
inline ComplexMatrix chi_basis_1q(int index) {
  switch (index) {
    case 0: return pauli::identity();
    case 1: return pauli::x();
    case 2: return -kI * pauli::y();
    case 3: return pauli::z();
    default: throw TomographyError("chi_basis_1q: index out of range");
  }
}

/// E_m = B_{m / 4} (x) B_{m % 4}.
inline ComplexMatrix chi_basis(int m) { return kron(chi_basis_1q(m / 4), chi_basis_1q(m % 4)); }

/// Labels of the chi basis; "Y" stands for -i sigma_y.
inline const std::array<std::string, 16>& chi_basis_labels() { return two_qubit_pauli_labels(); }

class ChiMatrix {
 public:
  ChiMatrix() : chi_(ComplexMatrix::Zero(16, 16)) {}

  explicit ChiMatrix(ComplexMatrix chi) : chi_(std::move(chi)) {
    if (chi_.rows() != 16 || chi_.cols() != 16) throw TomographyError("ChiMatrix: must be 16x16");
    const double asym = max_asymmetry(chi_);
    if (asym > 1e-9) throw TomographyError("ChiMatrix: not Hermitian (max asymmetry " + std::to_string(asym) + ")");
    chi_ = 0.5 * (chi_ + chi_.adjoint());
  }

  const ComplexMatrix& matrix() const { return chi_; }
  double trace() const { return chi_.trace().real(); }

  ChiMatrix normalized() const {
    const double tr = trace();
    if (!(tr > 0.0)) throw TomographyError("ChiMatrix: cannot normalize non-positive trace");
    return ChiMatrix(chi_ / tr);
  }

  /// Applies the channel encoded by chi.
  ComplexMatrix apply(const ComplexMatrix& rho) const {
    ComplexMatrix out = ComplexMatrix::Zero(4, 4);
    for (int m = 0; m < 16; ++m) {
      const ComplexMatrix em = chi_basis(m);
      for (int n = 0; n < 16; ++n) {
        if (chi_(m, n) == Complex{}) continue;
        out += chi_(m, n) * em * rho * chi_basis(n).adjoint();
      }
    }
    return out;
  }

 private:
  ComplexMatrix chi_;
};

/// chi of rho -> U rho U^dagger: chi = c c^dagger with c_m = Tr(E_m^dagger U) / 4.
inline ChiMatrix chi_from_unitary(const ComplexMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw TomographyError("chi_from_unitary: two-qubit unitary required");
  ComplexVector c(16);
  for (int m = 0; m < 16; ++m) c(m) = (chi_basis(m).adjoint() * u).trace() / 4.0;
  return ChiMatrix(c * c.adjoint());
}

/// The 16 product input states {|0>, |1>, |+>, |+i>}^{x2}.
inline std::vector<DensityMatrix> tomography_input_states() {
  const double r = 1.0 / std::sqrt(2.0);
  std::array<ComplexVector, 4> single;
  for (auto& v : single) v.resize(2);
  single[0] << 1.0, 0.0;
  single[1] << 0.0, 1.0;
  single[2] << r, r;
  single[3] << r, kI * r;
  std::vector<DensityMatrix> out;
  out.reserve(16);
  for (const auto& a : single) {
    for (const auto& b : single) out.emplace_back(StateVector(kron(a, b)));
  }
  return out;
}

/// Standard process tomography of a linear two-qubit channel
/// `DensityMatrix channel(const DensityMatrix&)`.
template <class Channel>
ChiMatrix process_tomography(Channel&& channel) {
  const auto inputs = tomography_input_states();
  // Columns: row-major vec of each input / output.
  ComplexMatrix in_vec(16, 16), out_vec(16, 16);
  for (int j = 0; j < 16; ++j) {
    const ComplexMatrix& rho_in = inputs[static_cast<std::size_t>(j)].matrix();
    const DensityMatrix rho_out = channel(inputs[static_cast<std::size_t>(j)]);
    if (rho_out.dim() != 4) throw TomographyError("process_tomography: channel must act on two qubits");
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        in_vec(4 * r + c, j) = rho_in(r, c);
        out_vec(4 * r + c, j) = rho_out.matrix()(r, c);
      }
    }
  }
  Eigen::FullPivLU<ComplexMatrix> lu(in_vec);
  if (lu.rank() != 16) throw TomographyError("process_tomography: input states are not informationally complete");
  // Superoperator on row-major vec: S = out * in^{-1}.
  const ComplexMatrix superop = out_vec * lu.inverse();

  // Choi matrix J = sum_rc |r><c| (x) E(|r><c|).
  ComplexMatrix choi = ComplexMatrix::Zero(16, 16);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const Eigen::Index col = 4 * r + c;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) choi(4 * r + a, 4 * c + b) = superop(4 * a + b, col);
      }
    }
  }
  // v(E_m)[4 i + a] = E_m(a, i); chi_mn = v_m^dagger J v_n / 16.
  ComplexMatrix v(16, 16);
  for (int m = 0; m < 16; ++m) {
    const ComplexMatrix em = chi_basis(m);
    for (int i = 0; i < 4; ++i) {
      for (int a = 0; a < 4; ++a) v(4 * i + a, m) = em(a, i);
    }
  }
  const ComplexMatrix chi = v.adjoint() * choi * v / 16.0;
  if (!chi.allFinite()) throw NumericalError("process_tomography: non-finite chi");
  return ChiMatrix(chi);
}

/// Tr(chi chi_ideal) on trace-normalized inputs, clamped to [0, 1].
inline double process_fidelity(const ChiMatrix& chi, const ChiMatrix& chi_ideal) {
  const ChiMatrix a = chi.normalized();
  const ChiMatrix b = chi_ideal.normalized();
  return std::clamp((a.matrix() * b.matrix()).trace().real(), 0.0, 1.0);
}

/// {"basis": [...], "y_convention": "-i*sigma_y", "re": [[...]], "im": [[...]]}.
inline nlohmann::json chi_to_json(const ChiMatrix& chi) {
  nlohmann::json j;
  j["basis"] = chi_basis_labels();
  j["y_convention"] = "-i*sigma_y";
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  for (int r = 0; r < 16; ++r) {
    auto row_re = nlohmann::json::array();
    auto row_im = nlohmann::json::array();
    for (int c = 0; c < 16; ++c) {
      const Complex v = chi.matrix()(r, c);
      row_re.push_back(v.real() == 0.0 ? 0.0 : v.real());
      row_im.push_back(v.imag() == 0.0 ? 0.0 : v.imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline ChiMatrix chi_from_json(const nlohmann::json& j) {
  if (!j.contains("re") || !j.contains("im")) throw TomographyError("chi_from_json: missing re/im");
  ComplexMatrix m(16, 16);
  for (int r = 0; r < 16; ++r) {
    for (int c = 0; c < 16; ++c) {
      m(r, c) = Complex(j["re"].at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>(),
                        j["im"].at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>());
    }
  }
  return ChiMatrix(m);
}

}  // namespace dqsim
