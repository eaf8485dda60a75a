#include "spincat/dynamics.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spincat {

std::string to_string(Frame f) {
  switch (f) {
    case Frame::lab: return "lab";
    case Frame::rotating: return "rotating";
    case Frame::effective: return "effective";
  }
  return "unknown";
}

Frame frame_from_string(std::string_view s) {
  if (s == "lab") return Frame::lab;
  if (s == "rotating") return Frame::rotating;
  if (s == "effective") return Frame::effective;
  throw std::invalid_argument("unknown frame '" + std::string(s) + "' (expected lab|rotating|effective)");
}

// --- HamiltonianSource -------------------------------------------------------

HamiltonianSource HamiltonianSource::constant(Operator h) {
  HamiltonianSource s;
  s.dim_ = static_cast<int>(h.rows());
  s.pieces_.push_back(std::move(h));
  return s;
}

HamiltonianSource HamiltonianSource::piecewise(std::vector<double> breakpoints, std::vector<Operator> pieces) {
  if (pieces.size() != breakpoints.size() + 1) {
    throw std::invalid_argument("piecewise source needs one more piece than breakpoints");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw std::invalid_argument("piecewise source breakpoints must be sorted");
  }
  HamiltonianSource s;
  s.dim_ = static_cast<int>(pieces.front().rows());
  s.breakpoints_ = std::move(breakpoints);
  s.pieces_ = std::move(pieces);
  return s;
}

HamiltonianSource HamiltonianSource::time_dependent(Fn fn, int dimension, std::vector<double> breakpoints) {
  HamiltonianSource s;
  s.fn_ = std::move(fn);
  s.dim_ = dimension;
  std::sort(breakpoints.begin(), breakpoints.end());
  s.breakpoints_ = std::move(breakpoints);
  return s;
}

int HamiltonianSource::piece_index(double t) const {
  if (fn_) return -1;
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<int>(it - breakpoints_.begin());
}

Operator HamiltonianSource::operator()(double t) const {
  if (fn_) return fn_(t);
  return pieces_[piece_index(t)];
}

// --- grids and specs ---------------------------------------------------------

void TimeGrid::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("time grid dt must be positive");
  if (!(t_end >= t_start)) throw std::invalid_argument("time grid requires t_end >= t_start");
  if (output_stride < 1) throw std::invalid_argument("time grid output_stride must be >= 1");
}

std::size_t TimeGrid::steps() const {
  const double span = t_end - t_start;
  if (span <= 0.0) return 0;
  const double n = span / dt;
  return static_cast<std::size_t>(std::ceil(n - 1e-9 * std::max(1.0, n)));
}

void DecoherenceSpec::validate() const {
  if (!(Gamma_m >= 0.0) || !(Gamma_e >= 0.0)) throw std::invalid_argument("decoherence rates must be non-negative");
}

Operator propagator(const Operator& h, double dt) {
  const Matrix arg = (-kI * dt) * h;
  return arg.exp();
}

// --- step planning -------------------------------------------------------------

namespace {

struct SubStep {
  double t0, t1;
};

// Sub-steps for uniform step [a, b], split at interior breakpoints.
void plan_step(double a, double b, const std::vector<double>& breakpoints, std::vector<SubStep>& out) {
  out.clear();
  const double eps = 1e-12 * std::max(1.0, std::abs(b - a));
  double cur = a;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), a + eps);
  for (; it != breakpoints.end() && *it < b - eps; ++it) {
    out.push_back({cur, *it});
    cur = *it;
  }
  out.push_back({cur, b});
}

std::string step_diagnostic(const TimeGrid& grid, double t, const std::string& what) {
  std::ostringstream os;
  os << what << " at t = " << t << " s with dt = " << grid.dt << " s; reduce the step size";
  return os.str();
}

// Propagator cache keyed on (constant piece, step length). Step lengths that
// differ only by rounding of the grid arithmetic share one propagator.
class PropagatorCache {
 public:
  const Matrix& get(const HamiltonianSource& h, const SubStep& s) {
    const double len = s.t1 - s.t0;
    const double mid = 0.5 * (s.t0 + s.t1);
    const int piece = h.piece_index(mid);
    if (piece >= 0 && piece == piece_ && std::abs(len - len_) <= 1e-9 * len_) return u_;
    u_ = propagator(h(mid), len);
    piece_ = piece;
    len_ = len;
    return u_;
  }

 private:
  Matrix u_;
  int piece_ = -2;
  double len_ = -1.0;
};

}  // namespace

Trajectory<PureState> evolve_unitary(const HamiltonianSource& h, const PureState& psi0, const TimeGrid& grid,
                                     Frame frame) {
  grid.validate();
  if (h.dimension() != psi0.dimension()) throw std::invalid_argument("evolve_unitary: dimension mismatch");

  Trajectory<PureState> traj;
  traj.frame = frame;
  traj.times.push_back(grid.t_start);
  traj.states.push_back(psi0);

  const std::size_t n = grid.steps();
  if (n == 0) return traj;
  const double step = (grid.t_end - grid.t_start) / static_cast<double>(n);

  Vector psi = psi0.amplitudes();
  PropagatorCache cache;
  std::vector<SubStep> subs;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = grid.t_start + step * static_cast<double>(k);
    const double b = (k + 1 == n) ? grid.t_end : grid.t_start + step * static_cast<double>(k + 1);
    plan_step(a, b, h.breakpoints(), subs);
    for (const auto& s : subs) psi = cache.get(h, s) * psi;

    if ((k + 1) % static_cast<std::size_t>(grid.output_stride) == 0 || k + 1 == n) {
      const double drift = std::abs(psi.norm() - 1.0);
      if (drift > 1e-6) throw InvariantError(step_diagnostic(grid, b, "norm drift " + std::to_string(drift)));
      traj.times.push_back(b);
      traj.states.emplace_back(psi, 1e-6);
    }
  }
  return traj;
}

std::vector<JumpOperator> jump_operators(const DecoherenceSpec& dec, int dimension) {
  dec.validate();
  const SpinQuantum spin(dimension - 1);
  const Matrix iz = spin_operators(spin).Iz;
  std::vector<JumpOperator> jumps;
  if (dec.Gamma_m > 0.0) jumps.push_back({dec.Gamma_m, iz});
  if (dec.Gamma_e > 0.0) jumps.push_back({dec.Gamma_e, iz * iz});
  return jumps;
}

Matrix lindblad_rhs(const Operator& h, const std::vector<JumpOperator>& jumps, const Matrix& rho) {
  Matrix out = -kI * (h * rho - rho * h);
  for (const auto& j : jumps) {
    const Matrix ldl = j.op.adjoint() * j.op;
    out += j.rate * (j.op * rho * j.op.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

Matrix liouvillian(const Operator& h, const std::vector<JumpOperator>& jumps) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  // vec(A X B) = (B^T kron A) vec(X)
  Matrix L = -kI * (Matrix(Eigen::kroneckerProduct(id, h)) - Matrix(Eigen::kroneckerProduct(h.transpose(), id)));
  for (const auto& j : jumps) {
    const Matrix ldl = j.op.adjoint() * j.op;
    L += j.rate * (Matrix(Eigen::kroneckerProduct(j.op.conjugate(), j.op)) -
                   0.5 * Matrix(Eigen::kroneckerProduct(id, ldl)) -
                   0.5 * Matrix(Eigen::kroneckerProduct(ldl.transpose(), id)));
  }
  return L;
}

Trajectory<DensityMatrix> evolve_lindblad(const HamiltonianSource& h, const DensityMatrix& rho0,
                                          const DecoherenceSpec& dec, const TimeGrid& grid, Frame frame) {
  grid.validate();
  if (h.dimension() != rho0.dimension()) throw std::invalid_argument("evolve_lindblad: dimension mismatch");
  const auto jumps = jump_operators(dec, rho0.dimension());

  Trajectory<DensityMatrix> traj;
  traj.frame = frame;
  traj.times.push_back(grid.t_start);
  traj.states.push_back(rho0);

  const std::size_t n = grid.steps();
  if (n == 0) return traj;
  const double step = (grid.t_end - grid.t_start) / static_cast<double>(n);
  const DensityTolerance tol{1e-8, 1e-8, -1e-7};

  Matrix rho = rho0.matrix();
  std::vector<SubStep> subs;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = grid.t_start + step * static_cast<double>(k);
    const double b = (k + 1 == n) ? grid.t_end : grid.t_start + step * static_cast<double>(k + 1);
    plan_step(a, b, h.breakpoints(), subs);
    for (const auto& s : subs) {
      const double dt = s.t1 - s.t0;
      const Matrix hm = h(0.5 * (s.t0 + s.t1));
      const Matrix k1 = lindblad_rhs(hm, jumps, rho);
      const Matrix k2 = lindblad_rhs(hm, jumps, rho + 0.5 * dt * k1);
      const Matrix k3 = lindblad_rhs(hm, jumps, rho + 0.5 * dt * k2);
      const Matrix k4 = lindblad_rhs(hm, jumps, rho + dt * k3);
      rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    if ((k + 1) % static_cast<std::size_t>(grid.output_stride) == 0 || k + 1 == n) {
      const double herm = linalg::hermiticity_residual(rho);
      if (herm > 1e-8) throw InvariantError(step_diagnostic(grid, b, "Hermiticity residual " + std::to_string(herm)));
      rho = 0.5 * (rho + rho.adjoint());
      const double tr_drift = std::abs(rho.trace().real() - 1.0);
      if (tr_drift > 1e-8) throw InvariantError(step_diagnostic(grid, b, "trace drift " + std::to_string(tr_drift)));
      try {
        traj.states.emplace_back(rho, tol);
      } catch (const InvariantError& e) {
        throw InvariantError(step_diagnostic(grid, b, std::string("positivity violated: ") + e.what()));
      }
      traj.times.push_back(b);
    }
  }
  return traj;
}

}  // namespace spincat
