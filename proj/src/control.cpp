#include "spincat/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spincat {

// --- schedule types ------------------------------------------------------------

void PulseSegment::validate() const {
  if (!(t_end > t_start)) throw std::invalid_argument("pulse segment requires t_end > t_start");
  double budget = 0.0;
  for (const auto& tone : tones) {
    if (!(tone.eps >= 0.0 && tone.eps <= 1.0)) throw std::invalid_argument("tone amplitude must lie in [0, 1]");
    budget += tone.eps;
  }
  if (budget > 1.0 + 1e-12) throw std::invalid_argument("sum of tone amplitudes exceeds 1");
}

double PulseSegment::envelope(double t) const {
  double s = 0.0;
  for (const auto& tone : tones) s += tone.eps * std::cos(tone.omega * (t - phase_origin) + tone.phi);
  return s;
}

PulseSchedule::PulseSchedule(std::vector<PulseSegment> segments) : segments_(std::move(segments)) {
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    segments_[i].validate();
    if (i > 0 && segments_[i].t_start < segments_[i - 1].t_end) {
      throw std::invalid_argument("pulse segments must be time-ordered and non-overlapping");
    }
  }
}

double PulseSchedule::amplitude(double t) const {
  for (const auto& seg : segments_) {
    if (seg.active(t)) return seg.envelope(t);
  }
  return 0.0;
}

std::vector<double> PulseSchedule::edges() const {
  std::vector<double> e;
  for (const auto& seg : segments_) {
    e.push_back(seg.t_start);
    e.push_back(seg.t_end);
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

// --- pulse synthesis -----------------------------------------------------------

double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);  // [-pi, pi]
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

double multitone_envelope(double t, std::span<const double> freqs, double phi, double t0) {
  if (freqs.empty()) throw std::invalid_argument("multitone_envelope: empty frequency vector");
  double s = 0.0;
  for (double w : freqs) s += std::cos(w * (t - t0) + phi);
  return s / static_cast<double>(freqs.size());
}

PulseSchedule cat_schedule(std::span<const double> freqs, double delta_phi, double T, double t_half_pi) {
  if (freqs.empty()) throw std::invalid_argument("cat_schedule: empty frequency vector");
  if (T < 0.0) throw std::invalid_argument("cat_schedule: negative free-evolution time T");
  if (!(t_half_pi > 0.0)) throw std::invalid_argument("cat_schedule: t_half_pi must be positive");
  const double eps = 1.0 / static_cast<double>(freqs.size());
  auto tones = [&](double phi) {
    std::vector<ToneSpec> v;
    for (double w : freqs) v.push_back({w, eps, phi});
    return v;
  };
  PulseSegment first{tones(0.0), 0.0, t_half_pi, 0.0};
  PulseSegment second{tones(wrap_phase(delta_phi)), T + t_half_pi, T + 2.0 * t_half_pi, T};
  return PulseSchedule({std::move(first), std::move(second)});
}

double rotating_phase_rule(double omega, double T) { return wrap_phase(0.5 * std::numbers::pi + omega * T); }

RotationParams rotation_params(const SpinQuantum& spin, double gamma_B1, double Theta) {
  if (!(gamma_B1 > 0.0)) throw std::invalid_argument("rotation_params: gamma_B1 must be positive");
  const double omega = gamma_B1 / (4.0 * spin.I());
  return {omega, Theta / omega, Theta};
}

std::vector<double> ladder_matrix_elements(const SpinQuantum& spin) {
  const auto ix = spin_operators(spin).Ix;
  std::vector<double> h(spin.twice_I());
  for (int j = 0; j < spin.twice_I(); ++j) h[j] = ix(j, j + 1).real();
  return h;
}

namespace {

double resonance_tolerance(const std::vector<double>& w) {
  double spacing = 0.0;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) spacing = std::max(spacing, std::abs(w[j + 1] - w[j]));
  double scale = 0.5 * spacing;
  if (scale == 0.0) {
    for (double x : w) scale = std::max(scale, 1e-6 * std::abs(x));
  }
  return 1e-6 * std::max(scale, 1e-300);
}

double axis_phase(DriveAxis axis) { return axis == DriveAxis::y ? 0.5 * std::numbers::pi : 0.0; }

}  // namespace

Operator rotating_frame_hamiltonian(std::span<const ToneSpec> tones, const SpinQuantum& spin, double gamma_B1,
                                    const EnergyLadder& ladder, DriveAxis axis) {
  const int n = spin.twice_I();
  if (static_cast<int>(ladder.transition_freqs.size()) != n) {
    throw std::invalid_argument("rotating_frame_hamiltonian: ladder does not match spin");
  }
  const double tol = resonance_tolerance(ladder.transition_freqs);
  std::vector<cplx> coupling(n, 0.0);
  for (const auto& tone : tones) {
    bool matched = false;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tone.omega - ladder.transition_freqs[j]) < tol) {
        coupling[j] += tone.eps * std::exp(-kI * (tone.phi + axis_phase(axis)));
        matched = true;
      }
    }
    if (!matched) {
      throw std::invalid_argument("tone at " + std::to_string(rad_to_hz(tone.omega)) +
                                  " Hz is not resonant with any ladder transition");
    }
  }
  const auto h = ladder_matrix_elements(spin);
  Matrix hr = Matrix::Zero(n + 1, n + 1);
  for (int j = 0; j < n; ++j) {
    hr(j, j + 1) = 0.5 * gamma_B1 * h[j] * coupling[j];
    hr(j + 1, j) = std::conj(hr(j, j + 1));
  }
  return hr;
}

std::vector<double> virtual_phase_update(std::span<const double> phases, double T, double omega_q_eff,
                                         const SpinQuantum& spin) {
  if (static_cast<int>(phases.size()) != spin.twice_I()) {
    throw std::invalid_argument("virtual_phase_update: expected 2I phases");
  }
  const double I = spin.I();
  std::vector<double> out(phases.size());
  for (std::size_t idx = 0; idx < phases.size(); ++idx) {
    const double j = static_cast<double>(idx + 1);
    const double lower = I - j, upper = I - j + 1.0;
    out[idx] = wrap_phase(phases[idx] + T * omega_q_eff * (lower * lower - upper * upper));
  }
  return out;
}

Operator virtual_frame(const SpinQuantum& spin, double T, double omega_q_eff) {
  const int d = spin.dimension();
  const double I = spin.I();
  Matrix u = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double k = spin.m_at(i);
    u(i, i) = std::exp(-kI * T * omega_q_eff * (k * k - I * I));
  }
  return u;
}

PulseSchedule givens_schedule(const SpinQuantum& spin, double gamma_B1, const EnergyLadder& ladder, GivensMode mode) {
  if (!(gamma_B1 > 0.0)) throw std::invalid_argument("givens_schedule: gamma_B1 must be positive");
  const int n = spin.twice_I();
  const auto h = ladder_matrix_elements(spin);
  std::vector<PulseSegment> segs;
  double t = 0.0;
  // Phases are referenced to t = 0 (phase_origin 0) so every pulse acts with
  // zero phase in the rotating frame.
  auto push = [&](int j, double angle) {
    const double eps = std::min(1.0, 1.0 / h[j]);
    const double duration = angle / (gamma_B1 * h[j] * eps);
    segs.push_back({{ToneSpec{ladder.transition_freqs[j], eps, 0.0}}, t, t + duration, 0.0});
    t += duration;
  };
  const double pi = std::numbers::pi;
  push(0, 0.5 * pi);
  for (int j = 1; j < n; ++j) push(j, pi);
  if (mode == GivensMode::collapse) {
    for (int j = 0; j + 1 < n; ++j) push(j, pi);
    push(n - 1, 0.5 * pi);
  }
  return PulseSchedule(std::move(segs));
}

// --- frame sources -------------------------------------------------------------

HamiltonianSource rotating_frame_source(const PulseSchedule& schedule, const SpinQuantum& spin, double gamma_B1,
                                        const EnergyLadder& ladder, DriveAxis axis) {
  const int d = spin.dimension();
  std::vector<double> breaks;
  std::vector<Operator> pieces{Matrix::Zero(d, d)};
  for (const auto& seg : schedule.segments()) {
    std::vector<ToneSpec> referenced = seg.tones;
    for (auto& tone : referenced) tone.phi = wrap_phase(tone.phi - tone.omega * seg.phase_origin);
    if (!breaks.empty() && breaks.back() == seg.t_start) {
      pieces.back() = rotating_frame_hamiltonian(referenced, spin, gamma_B1, ladder, axis);
    } else {
      breaks.push_back(seg.t_start);
      pieces.push_back(rotating_frame_hamiltonian(referenced, spin, gamma_B1, ladder, axis));
    }
    breaks.push_back(seg.t_end);
    pieces.push_back(Matrix::Zero(d, d));
  }
  return HamiltonianSource::piecewise(std::move(breaks), std::move(pieces));
}

HamiltonianSource lab_frame_source(const PulseSchedule& schedule, const Operator& h_static, const SpinQuantum& spin,
                                   double gamma_B1, DriveAxis axis) {
  const auto ops = spin_operators(spin);
  Operator drive = gamma_B1 * (axis == DriveAxis::x ? ops.Ix : ops.Iy);
  auto fn = [schedule, h_static, drive](double t) -> Operator {
    const double e = schedule.amplitude(t);
    if (e == 0.0) return h_static;
    return h_static + e * drive;
  };
  return HamiltonianSource::time_dependent(std::move(fn), spin.dimension(), schedule.edges());
}

HamiltonianSource effective_frame_source(const PulseSchedule& schedule, const SpinQuantum& spin,
                                         const FieldSpec& fields, double omega_q_eff, double omega_ref) {
  const auto ops = spin_operators(spin);
  const Operator h0 = (fields.gamma_B0 - omega_ref) * ops.Iz + omega_q_eff * ops.Iz * ops.Iz;
  const Operator iplus = ops.Iplus;
  const double gamma_B1 = fields.gamma_B1;
  const double offset = axis_phase(fields.drive_axis);
  auto fn = [schedule, h0, iplus, gamma_B1, omega_ref, offset](double t) -> Operator {
    for (const auto& seg : schedule.segments()) {
      if (!seg.active(t)) continue;
      cplx c = 0.0;
      for (const auto& tone : seg.tones) {
        const double arg = (tone.omega - omega_ref) * t + tone.phi - tone.omega * seg.phase_origin + offset;
        c += tone.eps * std::exp(-kI * arg);
      }
      const Matrix up = (0.25 * gamma_B1 * c) * iplus;
      return h0 + up + Matrix(up.adjoint());
    }
    return h0;
  };
  return HamiltonianSource::time_dependent(std::move(fn), spin.dimension(), schedule.edges());
}

PureState remove_frame_phases(const PureState& psi, std::span<const double> energies, double t) {
  if (static_cast<int>(energies.size()) != psi.dimension()) {
    throw std::invalid_argument("remove_frame_phases: dimension mismatch");
  }
  Vector v = psi.amplitudes();
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) *= std::exp(kI * energies[k] * t);
  return PureState(std::move(v), 1e-6);
}

}  // namespace spincat
