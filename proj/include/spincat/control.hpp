#pragma once

// Multi-tone pulse synthesis, the generalized rotating frame, virtual phase
// updates and the selective (Givens) pulse baseline.

#include "spincat/dynamics.hpp"
#include "spincat/hamiltonian.hpp"

#include <span>
#include <vector>

namespace spincat {

/// One carrier of a multi-tone pulse: eps * cos(omega (t - t0) + phi).
struct ToneSpec {
  double omega = 0.0;  // rad/s
  double eps = 0.0;
  double phi = 0.0;  // rad
};

struct PulseSegment {
  std::vector<ToneSpec> tones;
  double t_start = 0.0;
  double t_end = 0.0;
  double phase_origin = 0.0;  // t0 of every tone in this segment

  void validate() const;
  double envelope(double t) const;
  bool active(double t) const { return t >= t_start && t < t_end; }
};

class PulseSchedule {
 public:
  PulseSchedule() = default;
  explicit PulseSchedule(std::vector<PulseSegment> segments);

  const std::vector<PulseSegment>& segments() const { return segments_; }
  double duration() const { return segments_.empty() ? 0.0 : segments_.back().t_end; }
  /// eps(t); zero outside every segment.
  double amplitude(double t) const;
  /// Sorted segment start/end times.
  std::vector<double> edges() const;

 private:
  std::vector<PulseSegment> segments_;
};

struct RotationParams {
  double Omega = 0.0;     // rad/s
  double duration = 0.0;  // s
  double Theta = 0.0;     // rad
};

/// Wraps an angle to (-pi, pi].
double wrap_phase(double phi);

/// (1/N) sum_j cos(w_j (t - t0) + phi) over the N supplied frequencies.
double multitone_envelope(double t, std::span<const double> freqs, double phi, double t0);

/// Ramsey-like two-pulse schedule. Segment 1 spans [0, t_half_pi] with phase 0;
/// segment 2 spans [T + t_half_pi, T + 2 t_half_pi] with phase `delta_phi` and
/// resumes the first pulse's carrier (phase origin T), so `delta_phi` is
/// measured against the carrier of pulse 1 delayed by the gap.
PulseSchedule cat_schedule(std::span<const double> freqs, double delta_phi, double T, double t_half_pi);

/// Delta phi = pi/2 + omega T.
double rotating_phase_rule(double omega, double T);

/// Omega = gamma_B1 / 4I, duration = Theta / Omega.
RotationParams rotation_params(const SpinQuantum& spin, double gamma_B1, double Theta);

/// Resonant multi-tone drive in the frame diag(exp(-i e_k t)) under the
/// rotating-wave approximation: tridiagonal with upper entries
/// (gamma_B1 / 2) h_j sum_l eps_l exp(-i phi_l) over tones resonant with
/// transition j. Phases here are referenced to t = 0.
Operator rotating_frame_hamiltonian(std::span<const ToneSpec> tones, const SpinQuantum& spin, double gamma_B1,
                                    const EnergyLadder& ladder, DriveAxis axis = DriveAxis::x);

/// <I, I-(j-1)| Ix |I, I-j> for j = 1..2I.
std::vector<double> ladder_matrix_elements(const SpinQuantum& spin);

/// phi_j += T w_eff ((I-j)^2 - (I-j+1)^2): the per-transition share of the
/// free twisting phase exp(-i T w_eff Iz^2). Result wrapped to (-pi, pi].
std::vector<double> virtual_phase_update(std::span<const double> phases, double T, double omega_q_eff,
                                         const SpinQuantum& spin);

/// Diagonal frame change accumulated by a virtual update of length T:
/// exp(-i T w_eff (Iz^2 - I^2)).
Operator virtual_frame(const SpinQuantum& spin, double T, double omega_q_eff);

enum class GivensMode { create, collapse };

/// Selective single-tone pulses: create = pi/2 on w_{I,I-1} then pi pulses down
/// the ladder (2I pulses); collapse continues with pi pulses on transitions
/// 1..2I-1 and a closing pi/2 on transition 2I (4I pulses total). Each pulse
/// runs at transition Rabi frequency gamma_B1 (eps_j = 1/h_j, capped at 1).
PulseSchedule givens_schedule(const SpinQuantum& spin, double gamma_B1, const EnergyLadder& ladder, GivensMode mode);

// --- frame-specific Hamiltonian sources for a schedule ---------------------

/// Piecewise-constant H_rot per segment; zero between segments.
HamiltonianSource rotating_frame_source(const PulseSchedule& schedule, const SpinQuantum& spin, double gamma_B1,
                                        const EnergyLadder& ladder, DriveAxis axis = DriveAxis::x);

/// H_static + gamma_B1 eps(t) I_axis.
HamiltonianSource lab_frame_source(const PulseSchedule& schedule, const Operator& h_static, const SpinQuantum& spin,
                                   double gamma_B1, DriveAxis axis = DriveAxis::x);

/// Frame co-rotating at omega_ref about z (rotating-wave approximation on the
/// carrier only): (gamma_B0 - omega_ref) Iz + w_eff Iz^2 + drive with tones at
/// their offsets w_j - omega_ref. Cross-tone terms are kept.
HamiltonianSource effective_frame_source(const PulseSchedule& schedule, const SpinQuantum& spin,
                                         const FieldSpec& fields, double omega_q_eff, double omega_ref);

/// Multiplies amplitude k by exp(+i e_k t), undoing diag(exp(-i e_k t)).
PureState remove_frame_phases(const PureState& psi, std::span<const double> energies, double t);

}  // namespace spincat
