#pragma once

// Independent reference computations used only by tests.

#include "spincat/spin.hpp"

#include <cmath>
#include <random>

namespace oracle {

using spincat::cplx;
using spincat::Matrix;
using spincat::Vector;

struct Ops {
  Matrix x, y, z, plus, minus;
};

// Spin matrices from <m'|J+|m> = sqrt(j(j+1) - m(m+1)) delta_{m',m+1}, with m
// enumerated from +j downwards as plain doubles.
inline Ops spin_matrices(int twice_j) {
  const double j = 0.5 * twice_j;
  const int d = twice_j + 1;
  Ops o;
  o.plus = Matrix::Zero(d, d);
  o.z = Matrix::Zero(d, d);
  for (int r = 0; r < d; ++r) {
    const double m_row = j - r;
    o.z(r, r) = m_row;
    for (int c = 0; c < d; ++c) {
      const double m_col = j - c;
      if (std::abs(m_row - (m_col + 1.0)) < 1e-12) o.plus(r, c) = std::sqrt(j * (j + 1.0) - m_col * (m_col + 1.0));
    }
  }
  o.minus = o.plus.adjoint();
  o.x = 0.5 * (o.plus + o.minus);
  o.y = cplx(0.0, -0.5) * (o.plus - o.minus);
  return o;
}

// exp(A) by scaling and squaring of a truncated Taylor series.
inline Matrix taylor_expm(const Matrix& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.25) ++s;
  const Matrix b = a / std::pow(2.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline Matrix random_hermitian(int d, std::mt19937& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = cplx(g(rng), g(rng));
  return scale * 0.5 * (a + a.adjoint());
}

inline Vector random_state(int d, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = cplx(g(rng), g(rng));
  return v.normalized();
}

inline Matrix random_density(int d, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) a(r, c) = cplx(g(rng), g(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

// |<u|v>|^2 for unnormalized vectors.
inline double overlap(const Vector& u, const Vector& v) {
  return std::norm(u.dot(v)) / (u.squaredNorm() * v.squaredNorm());
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracle
