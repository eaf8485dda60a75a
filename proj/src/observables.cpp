#include "spincat/observables.hpp"

#include <cmath>
#include <numbers>

namespace spincat {

namespace {

void require_hermitian(const Operator& O) {
  if (linalg::hermiticity_residual(O) > 1e-12) throw std::invalid_argument("observable is not Hermitian");
}

Moments finish(double mean, double second) {
  double var = second - mean * mean;
  if (var < 0.0) {
    if (var < -1e-9 * std::max(1.0, second)) throw InvariantError("negative variance " + std::to_string(var));
    var = 0.0;
  }
  return {mean, var};
}

}  // namespace

Moments expectation_and_variance(const PureState& psi, const Operator& O) {
  require_hermitian(O);
  if (O.rows() != psi.dimension()) throw std::invalid_argument("expectation_and_variance: dimension mismatch");
  const Vector a = psi.amplitudes().normalized();
  const Vector oa = O * a;
  return finish(a.dot(oa).real(), oa.squaredNorm());
}

Moments expectation_and_variance(const DensityMatrix& rho, const Operator& O) {
  require_hermitian(O);
  if (O.rows() != rho.dimension()) throw std::invalid_argument("expectation_and_variance: dimension mismatch");
  const Matrix& r = rho.matrix();
  const double tr = r.trace().real();
  const Matrix ro = r * O;
  return finish(ro.trace().real() / tr, (ro * O).trace().real() / tr);
}

double effective_size(const PureState& psi, const Operator& O, const SpinQuantum& spin) {
  return 2.0 / spin.I() * expectation_and_variance(psi, O).variance;
}

double effective_size(const DensityMatrix& rho, const Operator& O, const SpinQuantum& spin) {
  return 2.0 / spin.I() * expectation_and_variance(rho, O).variance;
}

double HusimiGrid::theta(int i) const { return n_theta > 1 ? std::numbers::pi * i / (n_theta - 1) : 0.0; }
double HusimiGrid::phi(int k) const { return n_phi > 1 ? kTwoPi * k / (n_phi - 1) : 0.0; }

HusimiGrid husimi_q(const DensityMatrix& rho, const SpinQuantum& spin, int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2) throw std::invalid_argument("husimi grid needs at least 2 points per axis");
  if (rho.dimension() != spin.dimension()) throw std::invalid_argument("husimi_q: dimension mismatch");
  HusimiGrid g;
  g.twice_I = spin.twice_I();
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.values.resize(static_cast<std::size_t>(n_theta) * n_phi);
  const double norm = (spin.dimension()) / (2.0 * kTwoPi);
  const Matrix& r = rho.matrix();
  for (int i = 0; i < n_theta; ++i) {
    // exp(-i phi Iz) is diagonal, so the theta rotation is shared across the row.
    const Vector base = coherent_state(spin, g.theta(i), 0.0).amplitudes();
    for (int k = 0; k < n_phi; ++k) {
      Vector c = base;
      const double ph = g.phi(k);
      for (int n = 0; n < c.size(); ++n) c(n) *= std::exp(-kI * ph * spin.m_at(n));
      const double q = c.dot(r * c).real();
      g.values[static_cast<std::size_t>(i) * n_phi + k] = norm * std::max(q, 0.0);
    }
  }
  return g;
}

HusimiGrid husimi_q(const PureState& psi, const SpinQuantum& spin, int n_theta, int n_phi) {
  return husimi_q(DensityMatrix::from_pure(psi), spin, n_theta, n_phi);
}

double husimi_integral(const HusimiGrid& g) {
  const double dth = std::numbers::pi / (g.n_theta - 1);
  const double dph = kTwoPi / (g.n_phi - 1);
  double total = 0.0;
  for (int i = 0; i < g.n_theta; ++i) {
    const double wt = (i == 0 || i == g.n_theta - 1) ? 0.5 : 1.0;
    double row = 0.0;
    for (int k = 0; k < g.n_phi; ++k) {
      const double wp = (k == 0 || k == g.n_phi - 1) ? 0.5 : 1.0;
      row += wp * g.at(i, k);
    }
    total += wt * std::sin(g.theta(i)) * row;
  }
  return total * dth * dph;
}

double cat_coherence(const DensityMatrix& rho, const SpinQuantum& spin) {
  if (rho.dimension() != spin.dimension()) throw std::invalid_argument("cat_coherence: dimension mismatch");
  return std::abs(rho.matrix()(0, spin.dimension() - 1));
}

double flip_probability_peak(double gamma_B1, double delta_omega) {
  const double omega2 = gamma_B1 * gamma_B1 + 0.25 * delta_omega * delta_omega;
  if (omega2 == 0.0) return 0.0;
  return gamma_B1 * gamma_B1 / omega2;
}

double flip_probability(double gamma_B1, double delta_omega, double t) {
  const double omega = std::sqrt(gamma_B1 * gamma_B1 + 0.25 * delta_omega * delta_omega);
  const double s = std::sin(omega * t);
  return flip_probability_peak(gamma_B1, delta_omega) * s * s;
}

}  // namespace spincat
