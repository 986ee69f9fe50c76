#include "dqsim/models.hpp"
#include "dqsim/spectrum.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

using namespace dqsim;
using dqsim::testing::Rng;
using dqsim::testing::taylor_expm;

namespace {

std::vector<double> sorted_eigs(const ComplexMatrix& h) {
  const RealVector ev = eigenvalues_hermitian(h);
  std::vector<double> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end());
  return v;
}

void expect_spectrum(const ComplexMatrix& h, std::vector<double> expected, double tol = 1e-12) {
  std::sort(expected.begin(), expected.end());
  const auto got = sorted_eigs(h);
  ASSERT_EQ(got.size(), expected.size());
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], expected[k], tol) << "eigenvalue " << k;
}

ComplexVector fig2() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(1) = 1.0 / std::sqrt(2.0);
  return v;
}

ComplexVector fig3() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(1) = Complex(0.0, -1.0 / std::sqrt(2.0));
  return v;
}

}  // namespace

TEST(BuildXY, UnitCouplingSpectrum) {
  expect_spectrum(build_xy(SpinModelSpec::two_spin_xy(1.0, +1)), {-1, 0, 0, 1});
  expect_spectrum(build_xy(SpinModelSpec::two_spin_xy(1.0, -1)), {-1, 0, 0, 1});
}

TEST(BuildXY, ZeroCouplingIsZero) {
  EXPECT_EQ(build_xy(SpinModelSpec::two_spin_xy(0.0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(BuildXY, SwapMatrixElementIsSignedJ) {
  for (int sign : {+1, -1}) {
    const ComplexMatrix h = build_xy(SpinModelSpec::two_spin_xy(0.7, sign));
    EXPECT_NEAR(h(1, 2).real(), 0.7 * sign, 1e-15);
    EXPECT_NEAR(h(1, 2).imag(), 0.0, 1e-15);
    EXPECT_EQ(h(0, 0), Complex(0.0));
  }
}

TEST(BuildXY, WrongKindRejected) {
  EXPECT_THROW(build_xy(SpinModelSpec::two_spin_heisenberg()), ModelError);
  EXPECT_THROW(build_ising(SpinModelSpec::two_spin_xy()), ModelError);
  EXPECT_THROW(build_heisenberg(SpinModelSpec::two_spin_ising(1, 0)), ModelError);
}

TEST(BuildHeisenberg, IsotropicSpectrum) {
  expect_spectrum(build_heisenberg(SpinModelSpec::two_spin_heisenberg(1.0, +1)), {-3, 1, 1, 1});
}

TEST(BuildHeisenberg, ZeroCouplingsAndXYReduction) {
  EXPECT_EQ(build_heisenberg(SpinModelSpec::two_spin_heisenberg(0.0)).cwiseAbs().maxCoeff(), 0.0);
  for (int sign : {+1, -1}) {
    SpinModelSpec s = SpinModelSpec::two_spin_heisenberg(0.9, sign);
    s.jz = 0.0;
    const ComplexMatrix xy = build_xy(SpinModelSpec::two_spin_xy(0.9, sign));
    EXPECT_LT((build_heisenberg(s) - 2.0 * xy).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(BuildIsing, PureField) {
  const ComplexMatrix h = build_ising(SpinModelSpec::two_spin_ising(0.0, 2.0));
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(0, 0) = 2.0;
  expected(3, 3) = -2.0;
  EXPECT_LT((h - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildIsing, PureCoupling) {
  const ComplexMatrix h = build_ising(SpinModelSpec::two_spin_ising(1.0, 0.0, +1));
  EXPECT_LT((h - pauli_string("XX")).cwiseAbs().maxCoeff(), 1e-15);
  expect_spectrum(h, {-1, -1, 1, 1});
}

TEST(BuildIsing, FieldThreeSpectrumHasRootTen) {
  // Even sector {|00>,|11>}: [[B, J],[J, -B]] -> +-sqrt(B^2+J^2). Odd sector: +-J.
  for (int sign : {+1, -1}) {
    expect_spectrum(build_ising(SpinModelSpec::two_spin_ising(1.0, 3.0, sign)),
                    {-std::sqrt(10.0), -1, 1, std::sqrt(10.0)});
  }
}

TEST(SpinModelSpec, ValidatesPairs) {
  SpinModelSpec s = SpinModelSpec::two_spin_xy();
  s.pairs = {{0, 0}};
  EXPECT_THROW(s.validate(), ModelError);
  s.pairs = {{0, 2}};
  EXPECT_THROW(s.validate(), ModelError);
  s.pairs = {{0, 1}, {1, 0}};
  EXPECT_THROW(s.validate(), ModelError);
  s.pairs = {{0, 1}};
  s.j_sign = 0;
  EXPECT_THROW(s.validate(), ModelError);
  s.j_sign = 1;
  s.n_spins = 1;
  EXPECT_THROW(s.validate(), ModelError);
}

TEST(SpinModelSpec, ThreeSpinChainIsHermitianAndConservesMagnetization) {
  SpinModelSpec s = SpinModelSpec::two_spin_xy();
  s.n_spins = 3;
  s.pairs = {{0, 1}, {1, 2}};
  const ComplexMatrix h = build_xy(s);
  ASSERT_EQ(h.rows(), 8);
  EXPECT_TRUE(is_hermitian(h, 0.0));
  ComplexMatrix mz = ComplexMatrix::Zero(8, 8);
  for (int q = 0; q < 3; ++q) mz += embed(pauli::z(), q, 3);
  EXPECT_LT((h * mz - mz * h).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ExactEvolve, ZeroTimeIsIdentity) {
  const StateVector psi(fig3());
  const StateVector out = exact_evolve(build_ising(SpinModelSpec::two_spin_ising(1, 3)), 0.0, psi);
  EXPECT_LT((out.amplitudes() - psi.amplitudes()).norm(), 1e-15);
  EXPECT_THROW(exact_evolve(ComplexMatrix::Zero(2, 2), 1.0, psi), LinalgError);
}

TEST(ExactEvolve, XYAtPiSendsBlochVectorsToPlusYAndPlusZ) {
  const StateVector out =
      exact_evolve(build_xy(SpinModelSpec::two_spin_xy()), phase_angle_to_time(kPi), StateVector(fig2()));
  EXPECT_NEAR(expectation(out, embed(pauli::y(), 0, 2)), 1.0, 1e-12);
  EXPECT_NEAR(expectation(out, embed(pauli::z(), 1, 2)), 1.0, 1e-12);
  EXPECT_NEAR(expectation(out, embed(pauli::x(), 0, 2)), 0.0, 1e-12);
  EXPECT_NEAR(expectation(out, embed(pauli::z(), 0, 2)), 0.0, 1e-12);
}

TEST(ExactEvolve, MatchesTaylorOracle) {
  Rng rng(21);
  for (auto spec : {SpinModelSpec::two_spin_xy(), SpinModelSpec::two_spin_heisenberg(),
                    SpinModelSpec::two_spin_ising(1.0, 3.0)}) {
    const ComplexMatrix h = build_hamiltonian(spec);
    for (int trial = 0; trial < 10; ++trial) {
      const StateVector psi(rng.state(4));
      const double t = rng.uniform(0.0, 5.0);
      const ComplexVector oracle = taylor_expm(h, t) * psi.amplitudes();
      EXPECT_LT((exact_evolve(h, t, psi).amplitudes() - oracle).norm(), 1e-10);
    }
  }
}

TEST(ExactEvolve, ConservationLaws) {
  Rng rng(22);
  const ComplexMatrix xy = build_xy(SpinModelSpec::two_spin_xy());
  const ComplexMatrix heis = build_heisenberg(SpinModelSpec::two_spin_heisenberg());
  const ComplexMatrix ising = build_ising(SpinModelSpec::two_spin_ising(1.0, 3.0));
  const ComplexMatrix mz = pauli_string("ZI") + pauli_string("IZ");
  const ComplexMatrix dot = pauli_string("XX") + pauli_string("YY") + pauli_string("ZZ");
  for (int trial = 0; trial < 10; ++trial) {
    const StateVector psi(rng.state(4));
    const double e0 = expectation(psi, ising);
    const double m0 = expectation(psi, mz);
    const double d0 = expectation(psi, dot);
    for (double t = 0.0; t < 10.0; t += 0.37) {
      EXPECT_NEAR(expectation(exact_evolve(ising, t, psi), ising), e0, 1e-9);
      EXPECT_NEAR(expectation(exact_evolve(xy, t, psi), mz), m0, 1e-9);
      EXPECT_NEAR(expectation(exact_evolve(heis, t, psi), dot), d0, 1e-9);
      EXPECT_NEAR(exact_evolve(ising, t, psi).amplitudes().norm(), 1.0, 1e-10);
    }
  }
}

TEST(ExactEvolve, IsingCorrelatorOscillatesAtTwoRootTen) {
  const ComplexMatrix h = build_ising(SpinModelSpec::two_spin_ising(1.0, 3.0));
  const StateVector psi(fig3());
  const int n = 512;
  const double dt = 0.05;
  std::vector<double> xx;
  for (int k = 0; k < n; ++k) xx.push_back(expectation(exact_evolve(h, k * dt, psi), pauli_string("XX")));
  EXPECT_NEAR(dominant_frequency(xx, dt), 2.0 * std::sqrt(10.0), 0.01 * 2.0 * std::sqrt(10.0));
}

TEST(Spectrum, DominantFrequencyOfPureTone) {
  std::vector<double> s;
  const double dt = 0.01, omega = 7.3;
  for (int k = 0; k < 400; ++k) s.push_back(0.3 + std::cos(omega * k * dt + 0.4));
  EXPECT_NEAR(dominant_frequency(s, dt), omega, 1e-3);
  EXPECT_THROW(dominant_frequency(std::vector<double>{1, 2}, dt), std::invalid_argument);
}
