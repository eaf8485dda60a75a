#pragma once

// Static Zeeman + quadrupole Hamiltonians, their secular one-axis-twisting
// approximation and the level/transition ladder used to tune multi-tone drives.
// All couplings are angular frequencies (rad/s, hbar = 1).

#include "spincat/spin.hpp"

#include <vector>

namespace spincat {

struct EulerAngles {
  double delta = 0.0;
  double mu = 0.0;
  double nu = 0.0;
};

struct QuadrupoleSpec {
  double omega_q = 0.0;  // rad/s
  double eta = 0.0;
  EulerAngles euler{};

  void validate() const;
};

enum class DriveAxis { x, y };

struct FieldSpec {
  double gamma_B0 = 0.0;  // rad/s, static field along z
  double gamma_B1 = 0.0;  // rad/s, drive amplitude
  DriveAxis drive_axis = DriveAxis::x;

  void validate() const;
};

/// Level energies e_k (indexed like the basis, m = I first) and the 2I
/// consecutive transition frequencies w_{I-(j-1), I-j}, j = 1..2I.
struct EnergyLadder {
  std::vector<double> energies;
  std::vector<double> transition_freqs;
};

/// Principal-axis spin operators I_x', I_y', I_z' for a ZXZ Euler orientation.
struct PrincipalAxisOperators {
  Operator Ixp, Iyp, Izp;
};

PrincipalAxisOperators principal_axis_operators(const SpinQuantum& spin, const EulerAngles& euler);

/// 3 e q_n V_zz / (4 I (2I - 1) hbar) with SI inputs (q_n in m^2, V_zz in V/m^2).
double quadrupole_strength(double q_n, double v_zz, const SpinQuantum& spin);

Operator quadrupole_hamiltonian(const QuadrupoleSpec& spec, const SpinQuantum& spin);

/// gamma_B0 Iz + H_q.
Operator static_hamiltonian(const FieldSpec& fields, const QuadrupoleSpec& quad, const SpinQuantum& spin);

/// Labels eigenvectors of `h_static` by maximum overlap with |I,k>. Requires the
/// Zeeman-dominated regime: fails when the best overlap drops below 0.7 or two
/// eigenvectors claim the same m.
EnergyLadder energy_ladder(const Operator& h_static, const SpinQuantum& spin);

/// Ladder e_k = gamma_B0 k + omega_q_eff k^2 without diagonalization.
EnergyLadder effective_ladder(double gamma_B0, double omega_q_eff, const SpinQuantum& spin);

/// k^2 coefficient of a least-squares quadratic fit to diag(H_q) over k.
double effective_oat_strength(const QuadrupoleSpec& quad, const SpinQuantum& spin);

/// gamma_B0 Iz + omega_q_eff Iz^2 (drive added by the control module).
Operator effective_hamiltonian(const FieldSpec& fields, double omega_q_eff, const SpinQuantum& spin);

}  // namespace spincat
