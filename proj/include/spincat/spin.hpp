#pragma once

// Spin-I operators, basis and coherent states, rotations and state comparison.
//
// Basis ordering follows the Iz eigenbasis with m = I, I-1, ..., -I, so the
// state |I,m> lives at index I - m. Half-integers are carried as twice their
// value to keep the m arithmetic exact.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace spincat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Operator = Matrix;
using Vec3 = std::array<double, 3>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Converts a frequency in Hz to an angular frequency in rad/s.
constexpr double hz_to_rad(double hz) { return kTwoPi * hz; }
constexpr double rad_to_hz(double rad) { return rad / kTwoPi; }

/// Thrown whenever a physical or numerical invariant is violated.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpinQuantum {
 public:
  explicit SpinQuantum(int twice_I);

  int twice_I() const { return twice_I_; }
  int dimension() const { return twice_I_ + 1; }
  double I() const { return 0.5 * twice_I_; }

  /// Index of |I,m> for m = twice_m / 2. Throws on out-of-range or wrong parity.
  int index_of(int twice_m) const;
  /// Magnetic quantum number stored at a basis index.
  double m_at(int index) const { return I() - index; }

  bool operator==(const SpinQuantum&) const = default;

 private:
  int twice_I_;
};

struct SpinOperators {
  Operator Ix, Iy, Iz, Iplus, Iminus, Isq;
};

SpinOperators spin_operators(const SpinQuantum& spin);

class PureState {
 public:
  /// Validates ||psi|| = 1 within `tol`.
  explicit PureState(Vector amplitudes, double tol = 1e-10);
  static PureState normalized(Vector amplitudes);

  const Vector& amplitudes() const { return amp_; }
  int dimension() const { return static_cast<int>(amp_.size()); }
  Matrix projector() const { return amp_ * amp_.adjoint(); }

 private:
  Vector amp_;
};

struct DensityTolerance {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-8;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix rho, DensityTolerance tol = {});
  static DensityMatrix from_pure(const PureState& psi);

  const Matrix& matrix() const { return rho_; }
  int dimension() const { return static_cast<int>(rho_.rows()); }
  double min_eigenvalue() const;

 private:
  Matrix rho_;
};

PureState eigenstate(const SpinQuantum& spin, int twice_m);

/// exp(-i phi Iz) exp(-i theta Iy) |I,I>. This fixes the global phase used by
/// every fidelity comparison against a reference coherent state.
PureState coherent_state(const SpinQuantum& spin, double theta, double phi);

/// exp(-i angle (n . I)); `axis` must be a unit vector within 1e-10.
Operator rotation_operator(const SpinQuantum& spin, const Vec3& axis, double angle);

double fidelity(const PureState& a, const PureState& b);
double fidelity(const PureState& a, const DensityMatrix& b);
double fidelity(const DensityMatrix& a, const PureState& b);
/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

// Small dense helpers shared across modules.
namespace linalg {

/// ||A - A^dagger||_F / max(1, ||A||_F).
double hermiticity_residual(const Matrix& a);
/// exp(-i H t) for Hermitian H via its eigendecomposition.
Matrix expm_hermitian(const Matrix& h, double t);
Matrix identity(int d);

}  // namespace linalg

}  // namespace spincat
