#include "spincat/hamiltonian.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace spincat {

namespace {
constexpr double kElementaryCharge = 1.602176634e-19;  // C
constexpr double kHbar = 1.054571817e-34;              // J s
}  // namespace

void QuadrupoleSpec::validate() const {
  if (!(omega_q >= 0.0)) throw std::invalid_argument("omega_q must be non-negative");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
}

void FieldSpec::validate() const {
  if (!(gamma_B0 >= 0.0)) throw std::invalid_argument("gamma_B0 must be non-negative");
  if (!(gamma_B1 >= 0.0)) throw std::invalid_argument("gamma_B1 must be non-negative");
}

PrincipalAxisOperators principal_axis_operators(const SpinQuantum& spin, const EulerAngles& e) {
  const auto ops = spin_operators(spin);
  const double cd = std::cos(e.delta), sd = std::sin(e.delta);
  const double cm = std::cos(e.mu), sm = std::sin(e.mu);
  const double cn = std::cos(e.nu), sn = std::sin(e.nu);
  // Rows of the ZXZ rotation; the z' row is sin(mu)sin(delta), -sin(mu)cos(delta), cos(mu).
  PrincipalAxisOperators p;
  p.Ixp = (cn * cd - sn * cm * sd) * ops.Ix + (cn * sd + sn * cm * cd) * ops.Iy + (sn * sm) * ops.Iz;
  p.Iyp = (-sn * cd - cn * cm * sd) * ops.Ix + (-sn * sd + cn * cm * cd) * ops.Iy + (cn * sm) * ops.Iz;
  p.Izp = (sm * sd) * ops.Ix + (-sm * cd) * ops.Iy + cm * ops.Iz;
  return p;
}

double quadrupole_strength(double q_n, double v_zz, const SpinQuantum& spin) {
  if (spin.twice_I() < 2) throw std::invalid_argument("spin-1/2 nuclei carry no quadrupole moment");
  const double I = spin.I();
  return 3.0 * kElementaryCharge * q_n * v_zz / (4.0 * I * (2.0 * I - 1.0) * kHbar);
}

Operator quadrupole_hamiltonian(const QuadrupoleSpec& spec, const SpinQuantum& spin) {
  spec.validate();
  const auto p = principal_axis_operators(spin, spec.euler);
  const double I = spin.I();
  const Matrix casimir = I * (I + 1) * linalg::identity(spin.dimension());
  const Matrix h = p.Izp * p.Izp + (spec.eta / 3.0) * (p.Ixp * p.Ixp - p.Iyp * p.Iyp - casimir);
  return spec.omega_q * h;
}

Operator static_hamiltonian(const FieldSpec& fields, const QuadrupoleSpec& quad, const SpinQuantum& spin) {
  fields.validate();
  return fields.gamma_B0 * spin_operators(spin).Iz + quadrupole_hamiltonian(quad, spin);
}

namespace {

std::vector<double> transitions_from(const std::vector<double>& e) {
  std::vector<double> w(e.size() - 1);
  for (std::size_t j = 0; j + 1 < e.size(); ++j) w[j] = e[j] - e[j + 1];
  return w;
}

}  // namespace

EnergyLadder energy_ladder(const Operator& h_static, const SpinQuantum& spin) {
  const int d = spin.dimension();
  if (h_static.rows() != d || h_static.cols() != d) throw std::invalid_argument("energy_ladder: dimension mismatch");
  if (linalg::hermiticity_residual(h_static) > 1e-12) throw InvariantError("energy_ladder: Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h_static + h_static.adjoint()));
  std::vector<double> energies(d, 0.0);
  std::vector<bool> taken(d, false);
  for (int v = 0; v < d; ++v) {
    Eigen::Index best = 0;
    const double overlap = es.eigenvectors().col(v).cwiseAbs2().maxCoeff(&best);
    if (overlap < 0.7) {
      throw InvariantError("energy_ladder: eigenvector overlap " + std::to_string(overlap) +
                           " < 0.7; not in the Zeeman-dominated regime");
    }
    if (taken[best]) throw InvariantError("energy_ladder: two eigenvectors share the same dominant m");
    taken[best] = true;
    energies[best] = es.eigenvalues()(v);
  }
  return {energies, transitions_from(energies)};
}

EnergyLadder effective_ladder(double gamma_B0, double omega_q_eff, const SpinQuantum& spin) {
  std::vector<double> e(spin.dimension());
  for (int i = 0; i < spin.dimension(); ++i) {
    const double k = spin.m_at(i);
    e[i] = gamma_B0 * k + omega_q_eff * k * k;
  }
  return {e, transitions_from(e)};
}

double effective_oat_strength(const QuadrupoleSpec& quad, const SpinQuantum& spin) {
  const int d = spin.dimension();
  if (d < 3) return 0.0;
  const Matrix hq = quadrupole_hamiltonian(quad, spin);
  Eigen::MatrixXd design(d, 3);
  Eigen::VectorXd rhs(d);
  for (int i = 0; i < d; ++i) {
    const double k = spin.m_at(i);
    design(i, 0) = 1.0;
    design(i, 1) = k;
    design(i, 2) = k * k;
    rhs(i) = hq(i, i).real();
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  return coef(2);
}

Operator effective_hamiltonian(const FieldSpec& fields, double omega_q_eff, const SpinQuantum& spin) {
  const auto ops = spin_operators(spin);
  return fields.gamma_B0 * ops.Iz + omega_q_eff * ops.Iz * ops.Iz;
}

}  // namespace spincat
