#include "spincat/spin.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace spincat {

SpinQuantum::SpinQuantum(int twice_I) : twice_I_(twice_I) {
  if (twice_I < 1) {
    throw std::invalid_argument("spin must satisfy 2I >= 1 (spin-0 has no dynamics), got 2I = " +
                                std::to_string(twice_I));
  }
}

int SpinQuantum::index_of(int twice_m) const {
  if (std::abs(twice_m) > twice_I_ || (twice_I_ - twice_m) % 2 != 0) {
    throw std::invalid_argument("m = " + std::to_string(twice_m) + "/2 is not a valid projection for 2I = " +
                                std::to_string(twice_I_));
  }
  return (twice_I_ - twice_m) / 2;
}

SpinOperators spin_operators(const SpinQuantum& spin) {
  const int d = spin.dimension();
  const double I = spin.I();
  SpinOperators ops;
  ops.Iz = Matrix::Zero(d, d);
  ops.Iplus = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = spin.m_at(i);
    ops.Iz(i, i) = m;
    // <m+1|I+|m> sits one row above |m>.
    if (i > 0) ops.Iplus(i - 1, i) = std::sqrt(I * (I + 1) - m * (m + 1));
  }
  ops.Iminus = ops.Iplus.adjoint();
  ops.Ix = 0.5 * (ops.Iplus + ops.Iminus);
  ops.Iy = (ops.Iplus - ops.Iminus) / cplx(0.0, 2.0);
  ops.Isq = ops.Ix * ops.Ix + ops.Iy * ops.Iy + ops.Iz * ops.Iz;
  return ops;
}

PureState::PureState(Vector amplitudes, double tol) : amp_(std::move(amplitudes)) {
  const double n = amp_.norm();
  if (amp_.size() == 0 || std::abs(n - 1.0) > tol) {
    throw InvariantError("pure state norm " + std::to_string(n) + " deviates from 1");
  }
}

PureState PureState::normalized(Vector amplitudes) {
  const double n = amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return PureState(amplitudes / n);
}

DensityMatrix::DensityMatrix(Matrix rho, DensityTolerance tol) : rho_(std::move(rho)) {
  if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
    throw std::invalid_argument("density matrix must be square and non-empty");
  }
  if (linalg::hermiticity_residual(rho_) > tol.hermitian) {
    throw InvariantError("density matrix is not Hermitian");
  }
  const double tr = rho_.trace().real();
  if (std::abs(tr - 1.0) > tol.trace) {
    throw InvariantError("density matrix trace " + std::to_string(tr) + " deviates from 1");
  }
  const double lmin = min_eigenvalue();
  if (lmin < tol.min_eigenvalue) {
    throw InvariantError("density matrix has negative eigenvalue " + std::to_string(lmin));
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) { return DensityMatrix(psi.projector()); }

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

PureState eigenstate(const SpinQuantum& spin, int twice_m) {
  Vector v = Vector::Zero(spin.dimension());
  v(spin.index_of(twice_m)) = 1.0;
  return PureState(std::move(v));
}

PureState coherent_state(const SpinQuantum& spin, double theta, double phi) {
  const auto ops = spin_operators(spin);
  Vector up = Vector::Zero(spin.dimension());
  up(0) = 1.0;
  Vector v = linalg::expm_hermitian(ops.Iy, theta) * up;
  for (int i = 0; i < spin.dimension(); ++i) v(i) *= std::exp(-kI * phi * spin.m_at(i));
  return PureState::normalized(std::move(v));
}

Operator rotation_operator(const SpinQuantum& spin, const Vec3& axis, double angle) {
  const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (n == 0.0) throw std::invalid_argument("rotation axis must be non-zero");
  if (std::abs(n - 1.0) > 1e-10) throw std::invalid_argument("rotation axis must be normalized");
  const auto ops = spin_operators(spin);
  const Matrix gen = axis[0] * ops.Ix + axis[1] * ops.Iy + axis[2] * ops.Iz;
  return linalg::expm_hermitian(gen, angle);
}

namespace {

void require_same_dim(int a, int b) {
  if (a != b) throw std::invalid_argument("fidelity: dimension mismatch");
}

Matrix psd_sqrt(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.adjoint()));
  Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double fidelity(const PureState& a, const PureState& b) {
  require_same_dim(a.dimension(), b.dimension());
  return clamp01(std::norm(a.amplitudes().dot(b.amplitudes())));
}

double fidelity(const PureState& a, const DensityMatrix& b) {
  require_same_dim(a.dimension(), b.dimension());
  const Vector& v = a.amplitudes();
  return clamp01(v.dot(b.matrix() * v).real());
}

double fidelity(const DensityMatrix& a, const PureState& b) { return fidelity(b, a); }

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.dimension(), b.dimension());
  const Matrix sa = psd_sqrt(a.matrix());
  const Matrix m = sa * b.matrix() * sa;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return clamp01(tr * tr);
}

namespace linalg {

double hermiticity_residual(const Matrix& a) {
  return (a - a.adjoint()).norm() / std::max(1.0, a.norm());
}

Matrix expm_hermitian(const Matrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-kI * es.eigenvalues()(k) * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix identity(int d) { return Matrix::Identity(d, d); }

}  // namespace linalg

}  // namespace spincat
