#pragma once

// Measured quantities: effective cat size, moments, Husimi Q grids, cat
// coherence and the off-resonant flip probability.

#include "spincat/spin.hpp"

#include <string>
#include <utility>
#include <vector>

namespace spincat {

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// <O> and <O^2> - <O>^2. Rejects non-Hermitian O; variance in [-1e-12, 0) is clamped to 0.
Moments expectation_and_variance(const PureState& psi, const Operator& O);
Moments expectation_and_variance(const DensityMatrix& rho, const Operator& O);

/// (2/I) Var(O).
double effective_size(const PureState& psi, const Operator& O, const SpinQuantum& spin);
double effective_size(const DensityMatrix& rho, const Operator& O, const SpinQuantum& spin);

// Written into CSV headers as a space-free token.
inline constexpr const char* kHusimiConvention = "Q=(2I+1)/(4pi)*<theta,phi|rho|theta,phi>;coherent=exp(-i*phi*Iz)*exp(-i*theta*Iy)|I,I>";

/// Q on a uniform grid with theta in [0, pi] (n_theta points) and phi in
/// [0, 2 pi] (n_phi points), both endpoints included. values[i * n_phi + k].
struct HusimiGrid {
  int twice_I = 1;
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> values;
  std::string convention = kHusimiConvention;

  double theta(int i) const;
  double phi(int k) const;
  double at(int i, int k) const { return values[static_cast<std::size_t>(i) * n_phi + k]; }
};

HusimiGrid husimi_q(const DensityMatrix& rho, const SpinQuantum& spin, int n_theta = 181, int n_phi = 361);
HusimiGrid husimi_q(const PureState& psi, const SpinQuantum& spin, int n_theta = 181, int n_phi = 361);

/// Trapezoidal integral of Q sin(theta) dtheta dphi.
double husimi_integral(const HusimiGrid& grid);

/// |rho_{I,-I}|.
double cat_coherence(const DensityMatrix& rho, const SpinQuantum& spin);

/// (gamma_B1 / Omega)^2 sin^2(Omega t), Omega^2 = gamma_B1^2 + delta_omega^2 / 4.
double flip_probability(double gamma_B1, double delta_omega, double t);
/// (gamma_B1 / Omega)^2.
double flip_probability_peak(double gamma_B1, double delta_omega);

/// N_eff samples with an operator tag.
struct SizeSeries {
  std::vector<double> times;
  std::vector<double> n_eff;
  std::string operator_tag;
};

}  // namespace spincat
