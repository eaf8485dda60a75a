#include "oracles.hpp"
#include "spincat/hamiltonian.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <numbers>

using namespace spincat;
constexpr double kPi = std::numbers::pi;

namespace {

const double kB0 = hz_to_rad(8.25e6);
const double kWq = hz_to_rad(40e3);

Eigen::VectorXd spectrum(const Matrix& h) { return Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvalues(); }

Matrix traceless(const Matrix& h) {
  return h - (h.trace() / static_cast<double>(h.rows())) * Matrix::Identity(h.rows(), h.cols());
}

}  // namespace

TEST(QuadrupoleStrength, LinearAndSpinScaling) {
  const SpinQuantum s72(7), s52(5);
  EXPECT_EQ(quadrupole_strength(1e-29, 0.0, s72), 0.0);
  const double w1 = quadrupole_strength(1e-29, 1e21, s72);
  EXPECT_NEAR(quadrupole_strength(1e-29, 2e21, s72) / w1, 2.0, 1e-14);
  EXPECT_NEAR(w1 / quadrupole_strength(1e-29, 1e21, s52), 10.0 / 21.0, 1e-14);
  EXPECT_THROW(quadrupole_strength(1e-29, 1e21, SpinQuantum(1)), std::invalid_argument);
}

TEST(QuadrupoleHamiltonian, AlignedAxialIsDiagonalMSquared) {
  const SpinQuantum s(7);
  const Matrix h = quadrupole_hamiltonian({kWq, 0.0, {}}, s);
  for (int i = 0; i < 8; ++i) {
    const double m = s.m_at(i);
    EXPECT_NEAR(h(i, i).real() / kWq, m * m, 1e-12);
  }
  EXPECT_LT((h - Matrix(h.diagonal().asDiagonal())).norm(), 1e-9);
}

TEST(QuadrupoleHamiltonian, EqualsCounterTwistingFormForAllEta) {
  const SpinQuantum s(7);
  const auto o = oracle::spin_matrices(7);
  for (double eta = 0.0; eta <= 1.0 + 1e-12; eta += 0.125) {
    const Matrix h = quadrupole_hamiltonian({kWq, eta, {}}, s);
    const double a = 2 * eta / (3 - eta);
    const Matrix tact = kWq * (1 - eta / 3) * (o.z * o.z - a * o.y * o.y);
    EXPECT_LT((traceless(h) - traceless(tact)).norm(), 1e-9 * kWq) << eta;
  }
}

TEST(QuadrupoleHamiltonian, TiltedAxisAlongY) {
  const SpinQuantum s(7);
  const auto o = oracle::spin_matrices(7);
  const Matrix h = quadrupole_hamiltonian({kWq, 0.0, {0.0, kPi / 2, 0.0}}, s);
  EXPECT_LT((h - kWq * o.y * o.y).norm(), 1e-9 * kWq);
}

TEST(QuadrupoleHamiltonian, HermitianCasimirAndSpectrumInvariantOnRandomGrid) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(0.0, 2 * kPi), eta_d(0.0, 1.0);
  for (int tw : {2, 3, 5, 7, 9}) {
    const SpinQuantum s(tw);
    for (int k = 0; k < 12; ++k) {
      const double eta = eta_d(rng);
      const EulerAngles e{ang(rng), ang(rng), ang(rng)};
      const Matrix h = quadrupole_hamiltonian({kWq, eta, e}, s);
      EXPECT_LT(linalg::hermiticity_residual(h), 1e-12);
      const auto p = principal_axis_operators(s, e);
      const double I = s.I();
      EXPECT_LT((p.Ixp * p.Ixp + p.Iyp * p.Iyp + p.Izp * p.Izp - I * (I + 1) * Matrix::Identity(tw + 1, tw + 1)).norm(),
                1e-10);
      const auto ref = spectrum(quadrupole_hamiltonian({kWq, eta, {}}, s));
      EXPECT_LT((spectrum(h) - ref).cwiseAbs().maxCoeff(), 1e-9 * ref.cwiseAbs().maxCoeff());
    }
  }
}

TEST(StaticHamiltonian, PureZeemanAndPaperDiagonal) {
  const SpinQuantum s(7);
  const Matrix z = static_hamiltonian({kB0, 0, DriveAxis::x}, {0, 0, {}}, s);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(z(i, i).real(), kB0 * s.m_at(i), 1e-6);
  const Matrix h = static_hamiltonian({kB0, 0, DriveAxis::x}, {kWq, 0, {}}, s);
  for (int i = 0; i < 8; ++i) {
    const double m = s.m_at(i);
    EXPECT_NEAR(h(i, i).real(), kB0 * m + kWq * m * m, 1e-6);
  }
  EXPECT_NEAR(h(0, 0).real() - h(1, 1).real(), kB0 + 6 * kWq, 1e-6);
}

TEST(EnergyLadderTest, ZeemanOnlyHasEqualTransitions) {
  const SpinQuantum s(7);
  const auto l = energy_ladder(static_hamiltonian({kB0, 0, DriveAxis::x}, {0, 0, {}}, s), s);
  ASSERT_EQ(l.transition_freqs.size(), 7u);
  for (double w : l.transition_freqs) EXPECT_NEAR(w, kB0, 1e-6);
}

TEST(EnergyLadderTest, AlignedTransitionsAndSpacing) {
  const SpinQuantum s(7);
  const auto l = energy_ladder(static_hamiltonian({kB0, 0, DriveAxis::x}, {kWq, 0, {}}, s), s);
  for (int j = 1; j <= 7; ++j) {
    const double i = s.I() - (j - 1);  // upper level of transition j
    EXPECT_NEAR(l.transition_freqs[j - 1], kB0 + (2 * i - 1) * kWq, 1e-6);
  }
  for (int j = 0; j + 1 < 7; ++j) EXPECT_NEAR(l.transition_freqs[j] - l.transition_freqs[j + 1], 2 * kWq, 1e-6);
  for (int j = 0; j < 7; ++j)
    for (int k = j + 1; k < 7; ++k) EXPECT_NE(l.transition_freqs[j], l.transition_freqs[k]);
}

TEST(EnergyLadderTest, RejectsStronglyMixedRegime) {
  const SpinQuantum s(7);
  const Matrix h = static_hamiltonian({0.0, 0, DriveAxis::x}, {kWq, 1.0, {}}, s);
  EXPECT_THROW(energy_ladder(h, s), InvariantError);
}

TEST(EnergyLadderTest, RejectsNonHermitian) {
  const SpinQuantum s(1);
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(energy_ladder(h, s), InvariantError);
}

TEST(EffectiveOat, FitExamples) {
  const SpinQuantum s(7);
  EXPECT_NEAR(effective_oat_strength({kWq, 0, {}}, s), kWq, 1e-8 * kWq);
  EXPECT_NEAR(effective_oat_strength({kWq, 0, {0, kPi / 2, 0}}, s), -kWq / 2, 1e-8 * kWq);
  EXPECT_NEAR(effective_oat_strength({kWq, 1, {}}, s), kWq, 1e-8 * kWq);
  EXPECT_EQ(effective_oat_strength({kWq, 0, {}}, SpinQuantum(1)), 0.0);
}

TEST(EffectiveOat, MatchesFullSpectrumAtLargeZeemanRatio) {
  for (int tw : {3, 5, 7}) {
    const SpinQuantum s(tw);
    const QuadrupoleSpec q{kWq, 0.6, {0.3, 0.7, 1.1}};
    const double weff = effective_oat_strength(q, s);
    const auto full = energy_ladder(static_hamiltonian({kB0, 0, DriveAxis::x}, q, s), s);
    const auto eff = effective_ladder(kB0, weff, s);
    double shift = 0.0;
    for (int i = 0; i <= tw; ++i) shift += (full.energies[i] - eff.energies[i]) / (tw + 1);
    double worst = 0.0, scale = 0.0;
    for (int i = 0; i <= tw; ++i) {
      worst = std::max(worst, std::abs(full.energies[i] - eff.energies[i] - shift));
      scale = std::max(scale, std::abs(full.energies[i]));
    }
    // Second-order shifts scale as w_q^2 I^3 / gamma_B0 against a spectrum of width gamma_B0 I.
    const double ratio = kWq / kB0;
    EXPECT_LE(worst / scale, ratio * ratio * s.I() * s.I()) << tw;
  }
}

TEST(EffectiveHamiltonianTest, DiagonalMatchesLadder) {
  const SpinQuantum s(7);
  EXPECT_LT((effective_hamiltonian({kB0, 0, DriveAxis::x}, 0.0, s) - kB0 * spin_operators(s).Iz).norm(), 1e-6);
  const Matrix h = effective_hamiltonian({kB0, 0, DriveAxis::x}, kWq, s);
  const auto l = energy_ladder(static_hamiltonian({kB0, 0, DriveAxis::x}, {kWq, 0, {}}, s), s);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(h(i, i).real(), l.energies[i], 1e-6);
}

TEST(Specs, Validation) {
  EXPECT_THROW((QuadrupoleSpec{-1.0, 0, {}}).validate(), std::invalid_argument);
  EXPECT_THROW((QuadrupoleSpec{1.0, 1.5, {}}).validate(), std::invalid_argument);
  EXPECT_THROW((FieldSpec{-1.0, 0, DriveAxis::x}).validate(), std::invalid_argument);
  EXPECT_THROW((FieldSpec{1.0, -1.0, DriveAxis::x}).validate(), std::invalid_argument);
}
