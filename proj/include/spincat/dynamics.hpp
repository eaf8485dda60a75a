#pragma once

// Fixed-step integrators for the Schrodinger and Lindblad equations.
//
// Unitary runs use a midpoint piecewise-constant exponential per step; open
// runs use RK4 on the Lindblad generator with H frozen at the step midpoint.
// Steps are split at the source's breakpoints so pulse edges are hit exactly.

#include "spincat/spin.hpp"

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace spincat {

enum class Frame { lab, rotating, effective };

std::string to_string(Frame f);
Frame frame_from_string(std::string_view s);

/// A Hermitian operator-valued function of time.
class HamiltonianSource {
 public:
  using Fn = std::function<Operator(double)>;

  static HamiltonianSource constant(Operator h);
  /// `pieces[k]` applies on [breakpoints[k-1], breakpoints[k]); pieces.size() == breakpoints.size() + 1.
  static HamiltonianSource piecewise(std::vector<double> breakpoints, std::vector<Operator> pieces);
  static HamiltonianSource time_dependent(Fn fn, int dimension, std::vector<double> breakpoints = {});

  Operator operator()(double t) const;
  /// Index of the constant piece containing t, or -1 for time-dependent sources.
  int piece_index(double t) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  int dimension() const { return dim_; }

 private:
  HamiltonianSource() = default;
  std::vector<double> breakpoints_;
  std::vector<Operator> pieces_;
  Fn fn_;
  int dim_ = 0;
};

struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  double dt = 1e-9;
  int output_stride = 1;

  void validate() const;
  /// Number of uniform steps; the actual step is (t_end - t_start) / steps() <= dt.
  std::size_t steps() const;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  Frame frame = Frame::effective;

  const State& final_state() const { return states.back(); }
};

struct DecoherenceSpec {
  double Gamma_m = 0.0;  // 1/s, jump operator Iz
  double Gamma_e = 0.0;  // 1/s, jump operator Iz^2

  void validate() const;
};

/// exp(-i H dt) by scaling-and-squaring.
Operator propagator(const Operator& h, double dt);

Trajectory<PureState> evolve_unitary(const HamiltonianSource& h, const PureState& psi0, const TimeGrid& grid,
                                     Frame frame = Frame::effective);

Trajectory<DensityMatrix> evolve_lindblad(const HamiltonianSource& h, const DensityMatrix& rho0,
                                          const DecoherenceSpec& dec, const TimeGrid& grid,
                                          Frame frame = Frame::effective);

struct JumpOperator {
  double rate;
  Operator op;
};

std::vector<JumpOperator> jump_operators(const DecoherenceSpec& dec, int dimension);

/// d rho / dt for the Lindblad equation.
Matrix lindblad_rhs(const Operator& h, const std::vector<JumpOperator>& jumps, const Matrix& rho);

/// Column-stacked superoperator: vec(d rho/dt) = L vec(rho).
Matrix liouvillian(const Operator& h, const std::vector<JumpOperator>& jumps);

}  // namespace spincat
