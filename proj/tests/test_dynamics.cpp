#include "oracles.hpp"
#include "reference_integrator.hpp"
#include "spincat/dynamics.hpp"
#include "spincat/observables.hpp"

#include <gtest/gtest.h>

#include <climits>
#include <numbers>

using namespace spincat;
constexpr double kPi = std::numbers::pi;

namespace {

const double kWq = hz_to_rad(40e3);

Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

}  // namespace

TEST(Propagator, IdentityDiagonalAndTaylor) {
  std::mt19937 rng(23);
  const Matrix h = oracle::random_hermitian(6, rng, 3.0);
  EXPECT_LT((propagator(h, 0.0) - Matrix::Identity(6, 6)).norm(), 1e-14);
  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(1, 1) = -2.0;
  diag(2, 2) = 0.5;
  const Matrix u = propagator(diag, 0.3);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(u(i, i) - std::exp(-kI * 0.3 * diag(i, i))), 0.0, 1e-15);
  EXPECT_LT((propagator(h, 0.37) - oracle::taylor_expm(-kI * 0.37 * h)).norm(), 1e-12);
}

TEST(Propagator, UnitaryAndSemigroupOnRandomHermitians) {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> td(0.0, 2.0);
  for (int d : {2, 4, 8, 10}) {
    for (int k = 0; k < 5; ++k) {
      const Matrix h = oracle::random_hermitian(d, rng, 5.0);
      const double a = td(rng), b = td(rng);
      const Matrix ua = propagator(h, a);
      EXPECT_LT((ua.adjoint() * ua - Matrix::Identity(d, d)).norm(), 1e-12);
      EXPECT_LT((propagator(h, a + b) - propagator(h, b) * ua).norm(), 1e-11);
    }
  }
}

TEST(EvolveUnitary, ZeroHamiltonianLeavesStateUnchanged) {
  const SpinQuantum s(7);
  const auto psi0 = coherent_state(s, 1.1, 0.4);
  const auto traj = evolve_unitary(HamiltonianSource::constant(Matrix::Zero(8, 8)), psi0, {0.0, 1e-3, 1e-5, 10});
  EXPECT_EQ(traj.times.size(), 11u);
  EXPECT_LT((traj.final_state().amplitudes() - psi0.amplitudes()).norm(), 1e-13);
}

TEST(EvolveUnitary, LarmorHalfTurnFlipsEquatorialState) {
  const SpinQuantum s(7);
  const double w = hz_to_rad(1e6);
  const auto ops = spin_operators(s);
  const auto traj = evolve_unitary(HamiltonianSource::constant(w * ops.Iz), coherent_state(s, kPi / 2, 0.0),
                                   {0.0, kPi / w, 1e-9, INT_MAX});
  EXPECT_NEAR(fidelity(traj.final_state(), coherent_state(s, kPi / 2, kPi)), 1.0, 1e-10);
  EXPECT_NEAR(expectation_and_variance(traj.final_state(), ops.Ix).mean, -3.5, 1e-9);
}

TEST(EvolveUnitary, TwistingFormsCatAtQuarterRevival) {
  const SpinQuantum s(7);
  const auto ops = spin_operators(s);
  const double T = kPi / (2 * kWq);
  const auto traj = evolve_unitary(HamiltonianSource::constant(kWq * ops.Iz * ops.Iz), coherent_state(s, kPi / 2, 0),
                                   {0.0, T, 1e-7, INT_MAX});
  EXPECT_NEAR(effective_size(traj.final_state(), ops.Iy, s), 7.0, 1e-9);
  // Cat of two opposite equatorial coherent states.
  const double f = fidelity(traj.final_state(), coherent_state(s, kPi / 2, kPi / 2)) +
                   fidelity(traj.final_state(), coherent_state(s, kPi / 2, -kPi / 2));
  EXPECT_NEAR(f, 1.0, 1e-6);
}

TEST(EvolveUnitary, PiecewiseBreakpointsAreHitExactly) {
  // Breakpoint at 0.37 does not lie on the dt = 0.1 grid; a constant-per-step
  // integrator would otherwise mix the two pieces.
  std::mt19937 rng(31);
  const Matrix h1 = oracle::random_hermitian(4, rng), h2 = oracle::random_hermitian(4, rng);
  const auto src = HamiltonianSource::piecewise({0.37}, {h1, h2});
  const PureState psi0(oracle::random_state(4, rng));
  const auto traj = evolve_unitary(src, psi0, {0.0, 1.0, 0.1, 1});
  EXPECT_EQ(traj.times.size(), 11u);
  const Vector exact = oracle::taylor_expm(-kI * 0.63 * h2) * oracle::taylor_expm(-kI * 0.37 * h1) * psi0.amplitudes();
  EXPECT_LT((traj.final_state().amplitudes() - exact).norm(), 1e-12);
}

TEST(EvolveUnitary, MatchesRk4OracleAndSelfConverges) {
  const SpinQuantum s(3);
  const auto ops = spin_operators(s);
  const double w = 2.0;
  auto fn = [&](double t) -> Matrix { return 0.7 * ops.Iz * ops.Iz + std::cos(w * t) * ops.Ix; };
  const auto src = HamiltonianSource::time_dependent(fn, 4);
  const auto psi0 = eigenstate(s, 3);
  const Vector ref = oracle::rk4_schrodinger(fn, psi0.amplitudes(), 0.0, 5.0, 1e-4);
  auto err = [&](double dt) {
    return 1.0 - oracle::overlap(evolve_unitary(src, psi0, {0.0, 5.0, dt, INT_MAX}).final_state().amplitudes(), ref);
  };
  const double e1 = err(1e-2), e2 = err(5e-3);
  EXPECT_LT(e2, 1e-6);
  // Midpoint rule is second order: halving dt cuts the amplitude error by ~4.
  EXPECT_GT(e1 / e2, 8.0);
}

TEST(EvolveUnitary, ValidationErrors) {
  const SpinQuantum s(1);
  const auto src = HamiltonianSource::constant(Matrix::Zero(2, 2));
  EXPECT_THROW(evolve_unitary(src, eigenstate(s, 1), {0.0, 1.0, 0.0, 1}), std::invalid_argument);
  EXPECT_THROW(evolve_unitary(src, eigenstate(s, 1), {1.0, 0.0, 0.1, 1}), std::invalid_argument);
  EXPECT_THROW(evolve_unitary(src, eigenstate(SpinQuantum(3), 3), {0.0, 1.0, 0.1, 1}), std::invalid_argument);
  EXPECT_THROW(HamiltonianSource::piecewise({1.0}, {Matrix::Zero(2, 2)}), std::invalid_argument);
  EXPECT_THROW(frame_from_string("spin"), std::invalid_argument);
  EXPECT_EQ(frame_from_string("lab"), Frame::lab);
  EXPECT_EQ(to_string(Frame::rotating), "rotating");
}

TEST(TimeGridTest, StepCountToleratesRounding) {
  EXPECT_EQ((TimeGrid{0.0, 1e-3, 1e-9, 1}).steps(), 1000000u);
  EXPECT_EQ((TimeGrid{0.0, 0.3, 0.1, 1}).steps(), 3u);
  EXPECT_EQ((TimeGrid{0.0, 0.31, 0.1, 1}).steps(), 4u);
  EXPECT_EQ((TimeGrid{0.5, 0.5, 0.1, 1}).steps(), 0u);
}

TEST(Lindblad, LiouvillianMatchesRhsAndOracle) {
  std::mt19937 rng(37);
  const int d = 5;
  const Matrix h = oracle::random_hermitian(d, rng);
  const auto jumps = jump_operators({0.3, 0.05}, d);
  ASSERT_EQ(jumps.size(), 2u);
  const Matrix rho = oracle::random_density(d, rng);
  const Matrix rhs = lindblad_rhs(h, jumps, rho);
  EXPECT_LT((liouvillian(h, jumps) * vec(rho) - vec(rhs)).norm(), 1e-12);
  const std::vector<oracle::Jump> oj{{0.3, jumps[0].op}, {0.05, jumps[1].op}};
  EXPECT_LT((rhs - oracle::lindblad_derivative(h, oj, rho)).norm(), 1e-12);
  EXPECT_NEAR(std::abs(rhs.trace()), 0.0, 1e-12);
  EXPECT_TRUE(jump_operators({0.0, 0.0}, d).empty());
}

TEST(Lindblad, ClosedSystemLimitMatchesUnitary) {
  const SpinQuantum s(7);
  const auto ops = spin_operators(s);
  const auto src = HamiltonianSource::constant(kWq * ops.Iz * ops.Iz);
  const auto psi0 = coherent_state(s, kPi / 2, 0);
  const TimeGrid grid{0.0, 6.25e-6, 1e-9, INT_MAX};
  const auto pure = evolve_unitary(src, psi0, grid);
  const auto mixed = evolve_lindblad(src, DensityMatrix::from_pure(psi0), {}, grid);
  EXPECT_LT(oracle::trace_distance(mixed.final_state().matrix(), pure.final_state().projector()), 1e-8);
}

TEST(Lindblad, PureDephasingDecaysCoherencesAnalytically) {
  const SpinQuantum s(3);
  const DecoherenceSpec dec{50.0, 3.0};
  const auto psi0 = coherent_state(s, kPi / 2, 0);
  const auto rho0 = DensityMatrix::from_pure(psi0);
  const double t = 4e-3;
  const auto traj = evolve_lindblad(HamiltonianSource::constant(Matrix::Zero(4, 4)), rho0, dec, {0.0, t, 1e-5, INT_MAX});
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      const double ma = s.m_at(a), mb = s.m_at(b);
      const double rate = 0.5 * dec.Gamma_m * (ma - mb) * (ma - mb) +
                          0.5 * dec.Gamma_e * (ma * ma - mb * mb) * (ma * ma - mb * mb);
      const cplx expect = rho0.matrix()(a, b) * std::exp(-rate * t);
      EXPECT_NEAR(std::abs(traj.final_state().matrix()(a, b) - expect), 0.0, 1e-10) << a << "," << b;
    }
  }
}

TEST(Lindblad, QuadraticDephasingSparesExtremalCoherence) {
  // Iz^2 is identical on m = +I and m = -I, so that coherence survives.
  const SpinQuantum s(7);
  Vector cat = Vector::Zero(8);
  cat(0) = cat(7) = 1.0 / std::sqrt(2.0);
  const auto traj = evolve_lindblad(HamiltonianSource::constant(Matrix::Zero(8, 8)),
                                    DensityMatrix::from_pure(PureState(cat)), {0.0, 2.0}, {0.0, 1e-2, 1e-5, INT_MAX});
  EXPECT_NEAR(cat_coherence(traj.final_state(), s), 0.5, 1e-12);
}

TEST(Lindblad, MatchesRk4OracleWithDrive) {
  const SpinQuantum s(3);
  const auto ops = spin_operators(s);
  auto fn = [&](double t) -> Matrix { return 0.7 * ops.Iz * ops.Iz + std::cos(2.0 * t) * ops.Ix; };
  const auto src = HamiltonianSource::time_dependent(fn, 4);
  const DecoherenceSpec dec{0.2, 0.05};
  const auto rho0 = DensityMatrix::from_pure(eigenstate(s, 3));
  const auto jumps = jump_operators(dec, 4);
  const Matrix ref = oracle::rk4_lindblad(fn, {{0.2, jumps[0].op}, {0.05, jumps[1].op}}, rho0.matrix(), 0.0, 3.0, 1e-4);
  const auto traj = evolve_lindblad(src, rho0, dec, {0.0, 3.0, 2e-3, 100});
  EXPECT_LT(oracle::trace_distance(traj.final_state().matrix(), ref), 1e-5);
  for (const auto& r : traj.states) {
    EXPECT_NEAR(r.matrix().trace().real(), 1.0, 1e-8);
    EXPECT_GE(r.min_eigenvalue(), -1e-7);
  }
}

TEST(Lindblad, OversizedStepRaisesInvariantError) {
  const SpinQuantum s(7);
  Vector cat = Vector::Zero(8);
  cat(0) = cat(7) = 1.0 / std::sqrt(2.0);
  EXPECT_THROW(evolve_lindblad(HamiltonianSource::constant(Matrix::Zero(8, 8)), DensityMatrix::from_pure(PureState(cat)),
                               {1000.0, 0.0}, {0.0, 1e-3, 1e-3, 1}),
               InvariantError);
  EXPECT_THROW((DecoherenceSpec{-1.0, 0.0}).validate(), std::invalid_argument);
}

TEST(EvolveUnitary, NormDriftPerMillionSteps) {
  const SpinQuantum s(7);
  const auto ops = spin_operators(s);
  const Matrix h = hz_to_rad(8.25e6) * ops.Iz + kWq * ops.Iz * ops.Iz + hz_to_rad(1e5) * ops.Ix;
  const auto traj = evolve_unitary(HamiltonianSource::constant(h), coherent_state(s, 0.3, 0.2), {0.0, 1e-3, 1e-9, INT_MAX});
  EXPECT_LT(std::abs(traj.final_state().amplitudes().norm() - 1.0), 1e-9);
}

TEST(Lindblad, OutputSamplesAreHermitian) {
  const SpinQuantum s(3);
  const auto ops = spin_operators(s);
  const auto traj = evolve_lindblad(HamiltonianSource::constant(kWq * ops.Iz * ops.Iz + 1e3 * ops.Ix),
                                    DensityMatrix::from_pure(coherent_state(s, 1.0, 0.5)), {30.0, 5.0},
                                    {0.0, 1e-4, 1e-7, 50});
  for (const auto& r : traj.states) EXPECT_LT(linalg::hermiticity_residual(r.matrix()), 1e-10);
}
