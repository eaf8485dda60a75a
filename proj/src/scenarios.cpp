#include "spincat/scenarios.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace spincat {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr double kPi = std::numbers::pi;

// --- config parsing helpers ----------------------------------------------------

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_opt(const json& obj, const char* key, T& target) {
  if (obj.contains(key)) target = obj.at(key).get<T>();
}

template <class T>
void read_opt(const json& obj, const char* key, std::optional<T>& target) {
  if (obj.contains(key) && !obj.at(key).is_null()) target = obj.at(key).get<T>();
}

std::vector<double> hz_list(const json& arr) {
  std::vector<double> v;
  for (const auto& x : arr) v.push_back(hz_to_rad(x.get<double>()));
  return v;
}

std::vector<double> to_hz(const std::vector<double>& v) {
  std::vector<double> out;
  for (double x : v) out.push_back(rad_to_hz(x));
  return out;
}

PhaseRule phase_rule_from(const std::string& s) {
  if (s == "fixed") return PhaseRule::fixed;
  if (s == "rotating") return PhaseRule::rotating;
  throw std::invalid_argument("config: phase_rule must be fixed|rotating, got '" + s + "'");
}

DriveAxis drive_axis_from(const std::string& s) {
  if (s == "x") return DriveAxis::x;
  if (s == "y") return DriveAxis::y;
  throw std::invalid_argument("config: drive_axis must be x|y, got '" + s + "'");
}

// --- run helpers ---------------------------------------------------------------

Frame resolve_frame(const ScenarioConfig& cfg, Frame fallback, std::initializer_list<Frame> allowed) {
  const Frame f = cfg.frame.value_or(fallback);
  if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
    std::string names;
    for (Frame a : allowed) names += (names.empty() ? "" : "|") + to_string(a);
    throw std::invalid_argument("scenario '" + cfg.scenario + "' does not support frame '" + to_string(f) +
                                "' (supported: " + names + ")");
  }
  return f;
}

double step_for(const ScenarioConfig& cfg, Frame frame) {
  const double dt = cfg.dt.value_or(default_dt(frame));
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (frame == Frame::lab && dt > 1e-9 * (1.0 + 1e-12)) {
    throw std::invalid_argument("lab-frame runs require dt <= 1 ns");
  }
  return dt;
}

// Grid with `intervals` output samples after t0, each reached in a whole number of steps <= dt_max.
TimeGrid sampled_grid(double t0, double t1, std::size_t intervals, double dt_max) {
  const double interval = (t1 - t0) / static_cast<double>(intervals);
  const double ratio = interval / dt_max;
  const int stride = std::max(1, static_cast<int>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio))));
  return {t0, t1, interval / stride, stride};
}

TimeGrid final_only_grid(double t0, double t1, double dt) { return {t0, t1, dt, INT_MAX}; }

PureState zeeman_frame(const PureState& psi, const SpinQuantum& spin, double gamma_B0, double t) {
  if (gamma_B0 == 0.0) return psi;
  Vector v = psi.amplitudes();
  for (int k = 0; k < v.size(); ++k) v(k) *= std::exp(kI * gamma_B0 * spin.m_at(k) * t);
  return PureState(std::move(v), 1e-6);
}

double require_twisting(const ScenarioConfig& cfg) {
  const double w = cfg.omega_q_eff();
  if (std::abs(w) < 1e-12 * std::max(1.0, cfg.quadrupole.omega_q)) {
    throw std::invalid_argument("scenario '" + cfg.scenario + "' needs a non-zero effective twisting strength");
  }
  return w;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (x.empty() || at < x.front() - 1e-15 || at > x.back() * (1.0 + 1e-12)) return std::nan("");
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  if (std::abs(x[i] - at) <= 1e-12 * std::max(1e-300, std::abs(at))) return y[i];
  const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - w) * y[i - 1] + w * y[i];
}

std::vector<double> T_range(const RamseyParams& p) {
  if (!(p.T_step > 0.0)) throw std::invalid_argument("ramsey T_step must be positive");
  if (p.T_stop < p.T_start || p.T_start < 0.0) throw std::invalid_argument("ramsey T range is empty or negative");
  const auto n = static_cast<std::size_t>(std::floor((p.T_stop - p.T_start) / p.T_step + 1e-9)) + 1;
  std::vector<double> Ts(n);
  for (std::size_t i = 0; i < n; ++i) Ts[i] = p.T_start + p.T_step * static_cast<double>(i);
  return Ts;
}

double delta_phi_for(PhaseRule rule, double omega_ref, double T) {
  return rule == PhaseRule::rotating ? rotating_phase_rule(omega_ref, T) : wrap_phase(0.5 * kPi);
}

std::vector<ToneSpec> uniform_tones(const std::vector<double>& freqs, const std::vector<double>& phases) {
  std::vector<ToneSpec> tones;
  const double eps = 1.0 / static_cast<double>(freqs.size());
  for (std::size_t j = 0; j < freqs.size(); ++j) tones.push_back({freqs[j], eps, phases[j]});
  return tones;
}

json size_json(const SizeSeries& s) { return {{"operator", s.operator_tag}, {"samples", s.times.size()}}; }

std::string rate_tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

// --- config --------------------------------------------------------------------

void ScenarioConfig::validate() const {
  if (std::find(scenario_names().begin(), scenario_names().end(), scenario) == scenario_names().end()) {
    throw std::invalid_argument("unknown scenario '" + scenario + "'");
  }
  fields.validate();
  quadrupole.validate();
  decoherence.validate();
  if (dt && !(*dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (t_end && !(*t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
  if (oat.samples < 2) throw std::invalid_argument("oat samples must be >= 2");
  if (decoherence_sweep.Gamma_m_list.empty() || decoherence_sweep.Gamma_e_list.empty()) {
    throw std::invalid_argument("decoherence rate lists must be non-empty");
  }
  if (decoherence_sweep.n_peaks < 1 || decoherence_sweep.peak_stride_periods < 1) {
    throw std::invalid_argument("decoherence n_peaks and peak_stride_periods must be >= 1");
  }
  if (coherence_scaling.twice_I_list.empty()) throw std::invalid_argument("coherence-scaling twice_I_list is empty");
  if (tact.eta_list.empty() || tact.gamma_B0_list.empty()) throw std::invalid_argument("tact parameter lists are empty");
  if (!(tact.periods > 0.0) || !(tact.sample_interval > 0.0)) {
    throw std::invalid_argument("tact periods and sample_interval must be positive");
  }
  T_range(ramsey);
}

ScenarioConfig config_from_json(const json& doc) {
  check_keys(doc, {"scenario", "spin", "fields", "quadrupole", "decoherence", "frame", "time_grid", "output", "oat",
                   "ramsey", "virtual_phase", "decoherence_sweep", "coherence_scaling", "tact", "husimi"},
             "config");
  ScenarioConfig cfg;
  read_opt(doc, "scenario", cfg.scenario);
  if (doc.contains("spin")) {
    const auto& s = doc.at("spin");
    check_keys(s, {"twice_I"}, "spin");
    cfg.spin = SpinQuantum(s.at("twice_I").get<int>());
  }
  if (doc.contains("fields")) {
    const auto& f = doc.at("fields");
    check_keys(f, {"gamma_B0_hz", "gamma_B1_hz", "drive_axis"}, "fields");
    if (f.contains("gamma_B0_hz")) cfg.fields.gamma_B0 = hz_to_rad(f.at("gamma_B0_hz").get<double>());
    if (f.contains("gamma_B1_hz")) cfg.fields.gamma_B1 = hz_to_rad(f.at("gamma_B1_hz").get<double>());
    if (f.contains("drive_axis")) cfg.fields.drive_axis = drive_axis_from(f.at("drive_axis").get<std::string>());
  }
  if (doc.contains("quadrupole")) {
    const auto& q = doc.at("quadrupole");
    check_keys(q, {"omega_q_hz", "eta", "euler"}, "quadrupole");
    if (q.contains("omega_q_hz")) cfg.quadrupole.omega_q = hz_to_rad(q.at("omega_q_hz").get<double>());
    read_opt(q, "eta", cfg.quadrupole.eta);
    if (q.contains("euler")) {
      const auto e = q.at("euler").get<std::vector<double>>();
      if (e.size() != 3) throw std::invalid_argument("config: quadrupole.euler needs [delta, mu, nu]");
      cfg.quadrupole.euler = {e[0], e[1], e[2]};
    }
  }
  if (doc.contains("decoherence")) {
    const auto& d = doc.at("decoherence");
    check_keys(d, {"Gamma_m", "Gamma_e"}, "decoherence");
    read_opt(d, "Gamma_m", cfg.decoherence.Gamma_m);
    read_opt(d, "Gamma_e", cfg.decoherence.Gamma_e);
  }
  if (doc.contains("frame") && !doc.at("frame").is_null()) cfg.frame = frame_from_string(doc.at("frame").get<std::string>());
  if (doc.contains("time_grid")) {
    const auto& g = doc.at("time_grid");
    check_keys(g, {"dt", "t_end"}, "time_grid");
    read_opt(g, "dt", cfg.dt);
    read_opt(g, "t_end", cfg.t_end);
  }
  if (doc.contains("output")) {
    check_keys(doc.at("output"), {"dir"}, "output");
    read_opt(doc.at("output"), "dir", cfg.output_dir);
  }
  if (doc.contains("oat")) {
    const auto& p = doc.at("oat");
    check_keys(p, {"t_end", "samples", "observable"}, "oat");
    read_opt(p, "t_end", cfg.oat.t_end);
    read_opt(p, "samples", cfg.oat.samples);
    read_opt(p, "observable", cfg.oat.observable);
  }
  if (doc.contains("ramsey")) {
    const auto& p = doc.at("ramsey");
    check_keys(p, {"T_start", "T_stop", "T_step", "phase_rule", "reference_omega_hz", "observable"}, "ramsey");
    read_opt(p, "T_start", cfg.ramsey.T_start);
    read_opt(p, "T_stop", cfg.ramsey.T_stop);
    read_opt(p, "T_step", cfg.ramsey.T_step);
    if (p.contains("phase_rule")) cfg.ramsey.phase_rule = phase_rule_from(p.at("phase_rule").get<std::string>());
    if (p.contains("reference_omega_hz") && !p.at("reference_omega_hz").is_null()) {
      cfg.ramsey.reference_omega = hz_to_rad(p.at("reference_omega_hz").get<double>());
    }
    read_opt(p, "observable", cfg.ramsey.observable);
  }
  if (doc.contains("virtual_phase")) {
    const auto& p = doc.at("virtual_phase");
    check_keys(p, {"phi", "T"}, "virtual_phase");
    read_opt(p, "phi", cfg.virtual_phase.phi);
    read_opt(p, "T", cfg.virtual_phase.T);
  }
  if (doc.contains("decoherence_sweep")) {
    const auto& p = doc.at("decoherence_sweep");
    check_keys(p, {"Gamma_m_list", "Gamma_e_list", "n_peaks", "peak_stride_periods"}, "decoherence_sweep");
    read_opt(p, "Gamma_m_list", cfg.decoherence_sweep.Gamma_m_list);
    read_opt(p, "Gamma_e_list", cfg.decoherence_sweep.Gamma_e_list);
    read_opt(p, "n_peaks", cfg.decoherence_sweep.n_peaks);
    read_opt(p, "peak_stride_periods", cfg.decoherence_sweep.peak_stride_periods);
  }
  if (doc.contains("coherence_scaling")) {
    const auto& p = doc.at("coherence_scaling");
    check_keys(p, {"twice_I_list", "Gamma_m", "t"}, "coherence_scaling");
    read_opt(p, "twice_I_list", cfg.coherence_scaling.twice_I_list);
    read_opt(p, "Gamma_m", cfg.coherence_scaling.Gamma_m);
    read_opt(p, "t", cfg.coherence_scaling.t);
  }
  if (doc.contains("tact")) {
    const auto& p = doc.at("tact");
    check_keys(p, {"eta_list", "gamma_B0_hz_list", "periods", "sample_interval", "snapshot_times", "n_theta", "n_phi"},
               "tact");
    read_opt(p, "eta_list", cfg.tact.eta_list);
    if (p.contains("gamma_B0_hz_list")) cfg.tact.gamma_B0_list = hz_list(p.at("gamma_B0_hz_list"));
    read_opt(p, "periods", cfg.tact.periods);
    read_opt(p, "sample_interval", cfg.tact.sample_interval);
    read_opt(p, "snapshot_times", cfg.tact.snapshot_times);
    read_opt(p, "n_theta", cfg.tact.n_theta);
    read_opt(p, "n_phi", cfg.tact.n_phi);
  }
  if (doc.contains("husimi")) {
    const auto& p = doc.at("husimi");
    check_keys(p, {"state", "times", "theta", "phi", "n_theta", "n_phi"}, "husimi");
    read_opt(p, "state", cfg.husimi.state);
    read_opt(p, "times", cfg.husimi.times);
    read_opt(p, "theta", cfg.husimi.theta);
    read_opt(p, "phi", cfg.husimi.phi);
    read_opt(p, "n_theta", cfg.husimi.n_theta);
    read_opt(p, "n_phi", cfg.husimi.n_phi);
  }
  cfg.validate();
  return cfg;
}

json config_to_json(const ScenarioConfig& cfg) {
  auto opt = [](const auto& o) -> json { return o ? json(*o) : json(nullptr); };
  json doc;
  doc["scenario"] = cfg.scenario;
  doc["spin"] = {{"twice_I", cfg.spin.twice_I()}};
  doc["fields"] = {{"gamma_B0_hz", rad_to_hz(cfg.fields.gamma_B0)},
                   {"gamma_B1_hz", rad_to_hz(cfg.fields.gamma_B1)},
                   {"drive_axis", cfg.fields.drive_axis == DriveAxis::x ? "x" : "y"}};
  doc["quadrupole"] = {{"omega_q_hz", rad_to_hz(cfg.quadrupole.omega_q)},
                       {"eta", cfg.quadrupole.eta},
                       {"euler", {cfg.quadrupole.euler.delta, cfg.quadrupole.euler.mu, cfg.quadrupole.euler.nu}}};
  doc["decoherence"] = {{"Gamma_m", cfg.decoherence.Gamma_m}, {"Gamma_e", cfg.decoherence.Gamma_e}};
  doc["frame"] = cfg.frame ? json(to_string(*cfg.frame)) : json(nullptr);
  doc["time_grid"] = {{"dt", opt(cfg.dt)}, {"t_end", opt(cfg.t_end)}};
  doc["output"] = {{"dir", cfg.output_dir}};
  doc["oat"] = {{"t_end", opt(cfg.oat.t_end)}, {"samples", cfg.oat.samples}, {"observable", cfg.oat.observable}};
  doc["ramsey"] = {{"T_start", cfg.ramsey.T_start},
                   {"T_stop", cfg.ramsey.T_stop},
                   {"T_step", cfg.ramsey.T_step},
                   {"phase_rule", cfg.ramsey.phase_rule == PhaseRule::rotating ? "rotating" : "fixed"},
                   {"reference_omega_hz", cfg.ramsey.reference_omega ? json(rad_to_hz(*cfg.ramsey.reference_omega))
                                                                     : json(nullptr)},
                   {"observable", cfg.ramsey.observable}};
  doc["virtual_phase"] = {{"phi", cfg.virtual_phase.phi}, {"T", opt(cfg.virtual_phase.T)}};
  doc["decoherence_sweep"] = {{"Gamma_m_list", cfg.decoherence_sweep.Gamma_m_list},
                              {"Gamma_e_list", cfg.decoherence_sweep.Gamma_e_list},
                              {"n_peaks", cfg.decoherence_sweep.n_peaks},
                              {"peak_stride_periods", cfg.decoherence_sweep.peak_stride_periods}};
  doc["coherence_scaling"] = {{"twice_I_list", cfg.coherence_scaling.twice_I_list},
                              {"Gamma_m", cfg.coherence_scaling.Gamma_m},
                              {"t", cfg.coherence_scaling.t}};
  doc["tact"] = {{"eta_list", cfg.tact.eta_list},
                 {"gamma_B0_hz_list", to_hz(cfg.tact.gamma_B0_list)},
                 {"periods", cfg.tact.periods},
                 {"sample_interval", cfg.tact.sample_interval},
                 {"snapshot_times", cfg.tact.snapshot_times},
                 {"n_theta", cfg.tact.n_theta},
                 {"n_phi", cfg.tact.n_phi}};
  doc["husimi"] = {{"state", cfg.husimi.state},       {"times", cfg.husimi.times},     {"theta", cfg.husimi.theta},
                   {"phi", cfg.husimi.phi},           {"n_theta", cfg.husimi.n_theta}, {"n_phi", cfg.husimi.n_phi}};
  return doc;
}

double default_dt(Frame frame) { return frame == Frame::lab ? 1e-9 : 1e-7; }

Operator named_operator(const SpinQuantum& spin, const std::string& name) {
  const auto ops = spin_operators(spin);
  if (name == "x" || name == "Ix") return ops.Ix;
  if (name == "y" || name == "Iy") return ops.Iy;
  if (name == "z" || name == "Iz") return ops.Iz;
  throw std::invalid_argument("unknown observable '" + name + "' (expected Ix|Iy|Iz)");
}

PureState ideal_cat(const SpinQuantum& spin) {
  Vector v = Vector::Zero(spin.dimension());
  v(0) = v(spin.dimension() - 1) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

// --- scenarios -----------------------------------------------------------------

OatResult oat_free_evolution(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::effective, {Frame::effective, Frame::lab});
  const double dt = step_for(cfg, frame);
  const double w = require_twisting(cfg);
  const SpinQuantum& spin = cfg.spin;
  const double period = kPi / std::abs(w);
  const double t_end = cfg.oat.t_end.value_or(cfg.t_end.value_or(period));

  const Operator h = frame == Frame::lab ? static_hamiltonian(cfg.fields, cfg.quadrupole, spin)
                                         : Operator(w * spin_operators(spin).Iz * spin_operators(spin).Iz);
  const auto grid = sampled_grid(0.0, t_end, static_cast<std::size_t>(cfg.oat.samples - 1), dt);
  const auto traj = evolve_unitary(HamiltonianSource::constant(h), coherent_state(spin, 0.5 * kPi, 0.0), grid, frame);

  OatResult r;
  r.omega_q_eff = w;
  r.series.operator_tag = cfg.oat.observable;
  const Operator O = named_operator(spin, cfg.oat.observable);
  const double gB0 = frame == Frame::lab ? cfg.fields.gamma_B0 : 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    r.series.times.push_back(traj.times[i]);
    r.series.n_eff.push_back(effective_size(zeeman_frame(traj.states[i], spin, gB0, traj.times[i]), O, spin));
  }
  const auto peak = std::max_element(r.series.n_eff.begin(), r.series.n_eff.end());
  r.peak_n_eff = *peak;
  r.peak_time = r.series.times[static_cast<std::size_t>(peak - r.series.n_eff.begin())];
  r.n_eff_at_half_period = interpolate(r.series.times, r.series.n_eff, 0.5 * period);
  r.n_eff_at_period = interpolate(r.series.times, r.series.n_eff, period);
  r.final_state = traj.final_state();
  return r;
}

RamseyResult ramsey_cat_protocol(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::rotating, {Frame::rotating, Frame::effective, Frame::lab});
  const double dt = step_for(cfg, frame);
  if (cfg.decoherence.Gamma_m > 0.0 || cfg.decoherence.Gamma_e > 0.0) {
    throw std::invalid_argument("ramsey is a closed-system scenario; use 'decoherence' for non-zero rates");
  }
  const SpinQuantum& spin = cfg.spin;
  const double w = cfg.omega_q_eff();
  const Operator h_static = static_hamiltonian(cfg.fields, cfg.quadrupole, spin);
  const EnergyLadder ladder =
      frame == Frame::effective ? effective_ladder(cfg.fields.gamma_B0, w, spin) : energy_ladder(h_static, spin);
  const auto& freqs = ladder.transition_freqs;
  const Operator O = named_operator(spin, cfg.ramsey.observable);

  RamseyResult r;
  r.t_half_pi = rotation_params(spin, cfg.fields.gamma_B1, 0.5 * kPi).duration;
  r.omega_ref = cfg.ramsey.reference_omega.value_or(cfg.fields.gamma_B0);
  r.series.operator_tag = cfg.ramsey.observable;
  const auto Ts = T_range(cfg.ramsey);
  const PureState psi0 = eigenstate(spin, spin.twice_I());

  auto run = [&](std::size_t i) {
    const double T = Ts[i];
    const double dphi = delta_phi_for(cfg.ramsey.phase_rule, r.omega_ref, T);
    const auto sched = cat_schedule(freqs, dphi, T, r.t_half_pi);
    const double t3 = T + 2.0 * r.t_half_pi;
    std::optional<HamiltonianSource> src;
    switch (frame) {
      case Frame::rotating:
        src = rotating_frame_source(sched, spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis);
        break;
      case Frame::effective:
        src = effective_frame_source(sched, spin, cfg.fields, w, r.omega_ref);
        break;
      case Frame::lab:
        src = lab_frame_source(sched, h_static, spin, cfg.fields.gamma_B1, cfg.fields.drive_axis);
        break;
    }
    return evolve_unitary(*src, psi0, final_only_grid(0.0, t3, dt), frame).final_state();
  };
  r.final_states = parallel_map(Ts.size(), run);
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    r.series.times.push_back(Ts[i]);
    r.series.n_eff.push_back(effective_size(r.final_states[i], O, spin));
    r.delta_phi.push_back(delta_phi_for(cfg.ramsey.phase_rule, r.omega_ref, Ts[i]));
  }
  return r;
}

VirtualPhaseResult virtual_phase_cat(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::rotating, {Frame::rotating});
  const double dt = step_for(cfg, frame);
  const SpinQuantum& spin = cfg.spin;
  const double w = cfg.omega_q_eff();
  VirtualPhaseResult r;
  if (cfg.virtual_phase.T) {
    r.T = *cfg.virtual_phase.T;
  } else {
    r.T = 0.5 * kPi / std::abs(require_twisting(cfg));
  }
  if (r.T < 0.0) throw std::invalid_argument("virtual-phase T must be non-negative");

  const EnergyLadder ladder = energy_ladder(static_hamiltonian(cfg.fields, cfg.quadrupole, spin), spin);
  const auto& freqs = ladder.transition_freqs;
  const double t_half = rotation_params(spin, cfg.fields.gamma_B1, 0.5 * kPi).duration;
  const std::size_t n = freqs.size();

  r.first_phases.assign(n, wrap_phase(cfg.virtual_phase.phi));
  const std::vector<double> second_base(n, wrap_phase(cfg.virtual_phase.phi + 0.5 * kPi));
  r.second_phases = virtual_phase_update(second_base, r.T, w, spin);

  PulseSegment s1{uniform_tones(freqs, r.first_phases), 0.0, t_half, 0.0};
  PulseSegment s2{uniform_tones(freqs, r.second_phases), t_half, 2.0 * t_half, 0.0};
  r.schedule = PulseSchedule({s1, s2});
  const PureState psi0 = eigenstate(spin, spin.twice_I());
  const auto src = rotating_frame_source(r.schedule, spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis);
  r.final_state = evolve_unitary(src, psi0, final_only_grid(0.0, 2.0 * t_half, dt), frame).final_state();

  // Free-evolution protocol: pulse, exp(-i T w Iz^2), pulse at phase phi + pi/2.
  const auto ops = spin_operators(spin);
  const Matrix u1 = propagator(rotating_frame_hamiltonian(s1.tones, spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis), t_half);
  const Matrix u2 = propagator(
      rotating_frame_hamiltonian(uniform_tones(freqs, second_base), spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis),
      t_half);
  const Matrix free = linalg::expm_hermitian(w * ops.Iz * ops.Iz, r.T);
  r.reference_state = PureState::normalized(u2 * free * u1 * psi0.amplitudes());

  r.fidelity = fidelity(r.final_state, r.reference_state);
  r.framed_fidelity =
      fidelity(PureState::normalized(virtual_frame(spin, r.T, w) * r.final_state.amplitudes()), r.reference_state);
  r.n_eff = effective_size(r.final_state, ops.Iz, spin);
  return r;
}

GivensResult givens_baseline(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::rotating, {Frame::rotating});
  const double dt = step_for(cfg, frame);
  const SpinQuantum& spin = cfg.spin;
  const EnergyLadder ladder = energy_ladder(static_hamiltonian(cfg.fields, cfg.quadrupole, spin), spin);
  const PureState psi0 = eigenstate(spin, spin.twice_I());

  GivensResult r;
  r.create = givens_schedule(spin, cfg.fields.gamma_B1, ladder, GivensMode::create);
  r.collapse = givens_schedule(spin, cfg.fields.gamma_B1, ladder, GivensMode::collapse);
  r.create_duration = r.create.duration();
  r.collapse_duration = r.collapse.duration();
  const double w = cfg.omega_q_eff();
  r.oat_period = w != 0.0 ? kPi / std::abs(w) : std::numeric_limits<double>::infinity();

  auto run = [&](const PulseSchedule& s) {
    const auto src = rotating_frame_source(s, spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis);
    return evolve_unitary(src, psi0, final_only_grid(0.0, s.duration(), dt), frame).final_state();
  };
  r.create_state = run(r.create);
  r.collapse_state = run(r.collapse);
  for (int k = 0; k < spin.dimension(); ++k) r.create_populations.push_back(std::norm(r.create_state.amplitudes()(k)));
  r.collapse_fidelity = fidelity(r.collapse_state, eigenstate(spin, -spin.twice_I()));
  return r;
}

DecoherenceResult decoherence_sweep(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::rotating, {Frame::rotating});
  const double dt = step_for(cfg, frame);
  const SpinQuantum& spin = cfg.spin;
  const double w = require_twisting(cfg);
  const EnergyLadder ladder = energy_ladder(static_hamiltonian(cfg.fields, cfg.quadrupole, spin), spin);
  const auto& freqs = ladder.transition_freqs;
  const double omega_ref = cfg.ramsey.reference_omega.value_or(cfg.fields.gamma_B0);
  const auto& p = cfg.decoherence_sweep;
  const Operator iz = spin_operators(spin).Iz;

  DecoherenceResult result;
  result.t_half_pi = rotation_params(spin, cfg.fields.gamma_B1, 0.5 * kPi).duration;
  const double t_half = result.t_half_pi;
  const double period = kPi / std::abs(w);
  std::vector<double> Ts;
  for (int k = 0; k < p.n_peaks; ++k) Ts.push_back(0.5 * period + k * p.peak_stride_periods * period);

  std::vector<std::pair<double, double>> combos;
  for (double gm : p.Gamma_m_list)
    for (double ge : p.Gamma_e_list) combos.emplace_back(gm, ge);

  auto schedule_for = [&](double T) {
    return cat_schedule(freqs, delta_phi_for(cfg.ramsey.phase_rule, omega_ref, T), T, t_half);
  };
  const Operator zero = Matrix::Zero(spin.dimension(), spin.dimension());

  auto run = [&](std::size_t c) {
    DecoherenceRun run;
    run.Gamma_m = combos[c].first;
    run.Gamma_e = combos[c].second;
    run.peaks.operator_tag = "Iz";
    run.min_eigenvalue = 1.0;
    const DecoherenceSpec dec{run.Gamma_m, run.Gamma_e};
    auto track = [&](const DensityMatrix& rho) {
      run.max_trace_drift = std::max(run.max_trace_drift, std::abs(rho.matrix().trace().real() - 1.0));
      run.min_eigenvalue = std::min(run.min_eigenvalue, rho.min_eigenvalue());
    };

    // First pulse is shared by every branch; the gap is integrated once and branched at each T_k.
    const auto first = rotating_frame_source(schedule_for(Ts.front()), spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis);
    DensityMatrix rho = evolve_lindblad(first, DensityMatrix::from_pure(eigenstate(spin, spin.twice_I())), dec,
                                        final_only_grid(0.0, t_half, dt), frame)
                            .final_state();
    double t = t_half;
    for (double T : Ts) {
      if (t_half + T > t) {
        rho = evolve_lindblad(HamiltonianSource::constant(zero), rho, dec, final_only_grid(t, t_half + T, dt), frame)
                  .final_state();
        t = t_half + T;
      }
      track(rho);
      const auto second = rotating_frame_source(schedule_for(T), spin, cfg.fields.gamma_B1, ladder, cfg.fields.drive_axis);
      const auto fin =
          evolve_lindblad(second, rho, dec, final_only_grid(t, T + 2.0 * t_half, dt), frame).final_state();
      track(fin);
      run.T_values.push_back(T);
      run.peaks.times.push_back(T + 2.0 * t_half);
      run.peaks.n_eff.push_back(effective_size(fin, iz, spin));
      run.coherence.push_back(cat_coherence(fin, spin));
    }
    return run;
  };
  result.runs = parallel_map(combos.size(), run);
  return result;
}

std::vector<CoherencePoint> coherence_scaling(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::rotating, {Frame::rotating, Frame::effective, Frame::lab});
  const double dt = step_for(cfg, frame);
  const auto& p = cfg.coherence_scaling;
  if (!(p.t > 0.0)) throw std::invalid_argument("coherence-scaling t must be positive");
  auto run = [&](std::size_t i) {
    const SpinQuantum spin(p.twice_I_list[i]);
    const DecoherenceSpec dec{p.Gamma_m, 0.0};
    const Operator zero = Matrix::Zero(spin.dimension(), spin.dimension());
    const auto traj = evolve_lindblad(HamiltonianSource::constant(zero), DensityMatrix::from_pure(ideal_cat(spin)), dec,
                                      TimeGrid{0.0, p.t, dt, 100}, frame);
    CoherencePoint pt;
    pt.twice_I = spin.twice_I();
    pt.coherence = cat_coherence(traj.final_state(), spin);
    const double two_i = spin.twice_I();
    pt.analytic = 0.5 * std::exp(-p.Gamma_m * two_i * two_i * p.t / 2.0);
    pt.min_eigenvalue = 1.0;
    for (const auto& rho : traj.states) {
      pt.max_trace_drift = std::max(pt.max_trace_drift, std::abs(rho.matrix().trace().real() - 1.0));
      pt.min_eigenvalue = std::min(pt.min_eigenvalue, rho.min_eigenvalue());
    }
    return pt;
  };
  return parallel_map(p.twice_I_list.size(), run);
}

std::vector<TactRun> tact_oat_comparison(const ScenarioConfig& cfg) {
  const Frame frame = resolve_frame(cfg, Frame::lab, {Frame::lab});
  const double dt = step_for(cfg, frame);
  const SpinQuantum& spin = cfg.spin;
  const auto& p = cfg.tact;
  if (!(cfg.quadrupole.omega_q > 0.0)) throw std::invalid_argument("tact needs omega_q > 0");
  const double t_end = p.periods * kPi / cfg.quadrupole.omega_q;
  const auto intervals = static_cast<std::size_t>(std::ceil(t_end / p.sample_interval - 1e-9));

  // Cats form along the axis perpendicular to both the twisting axis z' and the initial x axis.
  const auto& e = cfg.quadrupole.euler;
  Vec3 axis{0.0, std::cos(e.mu), std::sin(e.mu) * std::cos(e.delta)};
  const double norm = std::hypot(axis[1], axis[2]);
  if (norm < 1e-9) {
    axis = {0.0, 1.0, 0.0};
  } else {
    for (int i : {1, 2}) {
      axis[i] /= norm;
      if (std::abs(axis[i]) < 1e-12) axis[i] = 0.0;
    }
  }
  const auto ops = spin_operators(spin);
  const Operator O = axis[1] * ops.Iy + axis[2] * ops.Iz;
  std::ostringstream tag;
  tag << "n=(0," << axis[1] << "," << axis[2] << ")";

  std::vector<std::pair<double, double>> combos;
  for (double eta : p.eta_list)
    for (double b0 : p.gamma_B0_list) combos.emplace_back(eta, b0);
  const PureState psi0 = coherent_state(spin, 0.5 * kPi, 0.0);

  auto run = [&](std::size_t c) {
    TactRun r;
    r.eta = combos[c].first;
    r.gamma_B0 = combos[c].second;
    r.observable = tag.str();
    r.series.operator_tag = r.observable;
    QuadrupoleSpec quad = cfg.quadrupole;
    quad.eta = r.eta;
    FieldSpec fields = cfg.fields;
    fields.gamma_B0 = r.gamma_B0;
    const Operator h = static_hamiltonian(fields, quad, spin);
    const auto traj =
        evolve_unitary(HamiltonianSource::constant(h), psi0, sampled_grid(0.0, t_end, intervals, dt), Frame::lab);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      const double n_eff = effective_size(zeeman_frame(traj.states[i], spin, r.gamma_B0, traj.times[i]), O, spin);
      r.series.times.push_back(traj.times[i]);
      r.series.n_eff.push_back(n_eff);
      r.max_relative_size = std::max(r.max_relative_size, n_eff / spin.twice_I());
    }
    for (double ts : p.snapshot_times) {
      const PureState psi = PureState::normalized(linalg::expm_hermitian(h, ts) * psi0.amplitudes());
      r.snapshots.emplace_back(ts, husimi_q(zeeman_frame(psi, spin, r.gamma_B0, ts), spin, p.n_theta, p.n_phi));
    }
    return r;
  };
  return parallel_map(combos.size(), run);
}

std::vector<HusimiSnapshot> husimi_snapshots(const ScenarioConfig& cfg) {
  const SpinQuantum& spin = cfg.spin;
  const auto& p = cfg.husimi;
  std::vector<HusimiSnapshot> out;
  auto add = [&](std::string label, double t, const PureState& psi) {
    HusimiSnapshot s{std::move(label), t, husimi_q(psi, spin, p.n_theta, p.n_phi), 0.0};
    s.integral = husimi_integral(s.grid);
    out.push_back(std::move(s));
  };
  if (p.state == "cat") {
    add("cat", 0.0, ideal_cat(spin));
  } else if (p.state == "coherent") {
    add("coherent", 0.0, coherent_state(spin, p.theta, p.phi));
  } else if (p.state == "oat") {
    const Frame frame = resolve_frame(cfg, Frame::effective, {Frame::effective});
    const double dt = step_for(cfg, frame);
    const double w = require_twisting(cfg);
    std::vector<double> times = p.times;
    if (times.empty()) times.push_back(0.5 * kPi / std::abs(w));
    const auto ops = spin_operators(spin);
    const auto src = HamiltonianSource::constant(w * ops.Iz * ops.Iz);
    const PureState psi0 = coherent_state(spin, 0.5 * kPi, 0.0);
    const auto states = parallel_map(times.size(), [&](std::size_t i) {
      if (times[i] <= 0.0) return psi0;
      return evolve_unitary(src, psi0, final_only_grid(0.0, times[i], dt), frame).final_state();
    });
    for (std::size_t i = 0; i < times.size(); ++i) {
      std::ostringstream label;
      label << "oat_t" << i;
      add(label.str(), times[i], states[i]);
    }
  } else {
    throw std::invalid_argument("husimi state must be cat|coherent|oat, got '" + p.state + "'");
  }
  return out;
}

// --- runner --------------------------------------------------------------------

RunSummary run_scenario(const ScenarioConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  RunSummary s;
  auto emit = [&](const fs::path& name) {
    s.outputs.push_back(out_dir / name);
    return out_dir / name;
  };
  const double two_i = cfg.spin.twice_I();

  if (cfg.scenario == "oat") {
    const auto r = oat_free_evolution(cfg);
    io::write_size_series(emit("oat_size.csv"), r.series);
    s.report = {{"omega_q_eff_hz", rad_to_hz(r.omega_q_eff)},
                {"peak_n_eff", r.peak_n_eff},
                {"peak_time", r.peak_time},
                {"n_eff_at_half_period", r.n_eff_at_half_period},
                {"n_eff_at_period", r.n_eff_at_period},
                {"series", size_json(r.series)}};
    for (double v : r.series.n_eff) {
      if (v > two_i + 1e-9) throw InvariantError("N_eff exceeds 2I");
    }
  } else if (cfg.scenario == "ramsey") {
    const auto r = ramsey_cat_protocol(cfg);
    io::write_size_series(emit("ramsey_size.csv"), r.series);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < r.series.times.size(); ++i) rows.push_back({r.series.times[i], r.delta_phi[i]});
    io::write_table(emit("ramsey_phases.csv"), {"T", "delta_phi"}, rows);
    s.report = {{"t_half_pi", r.t_half_pi},
                {"reference_omega_hz", rad_to_hz(r.omega_ref)},
                {"max_n_eff", *std::max_element(r.series.n_eff.begin(), r.series.n_eff.end())},
                {"series", size_json(r.series)}};
  } else if (cfg.scenario == "virtual-phase") {
    const auto r = virtual_phase_cat(cfg);
    io::write_schedule(emit("virtual_phase_schedule.json"), r.schedule);
    s.report = {{"T", r.T},
                {"first_phases", r.first_phases},
                {"second_phases", r.second_phases},
                {"fidelity_vs_free_evolution", r.fidelity},
                {"framed_fidelity_vs_free_evolution", r.framed_fidelity},
                {"n_eff_Iz", r.n_eff}};
    io::write_json(emit("virtual_phase_report.json"), s.report);
  } else if (cfg.scenario == "givens") {
    const auto r = givens_baseline(cfg);
    io::write_schedule(emit("givens_create_schedule.json"), r.create);
    io::write_schedule(emit("givens_collapse_schedule.json"), r.collapse);
    s.report = {{"create_pulses", r.create.segments().size()},
                {"collapse_pulses", r.collapse.segments().size()},
                {"create_duration", r.create_duration},
                {"collapse_duration", r.collapse_duration},
                {"oat_period", r.oat_period},
                {"create_populations", r.create_populations},
                {"collapse_fidelity_to_minus_I", r.collapse_fidelity}};
    io::write_json(emit("givens_report.json"), s.report);
  } else if (cfg.scenario == "decoherence") {
    const auto r = decoherence_sweep(cfg);
    json runs = json::array();
    for (const auto& run : r.runs) {
      const std::string name = "decoherence_Gm" + rate_tag(run.Gamma_m) + "_Ge" + rate_tag(run.Gamma_e) + ".csv";
      io::write_size_series(emit(name), run.peaks);
      runs.push_back({{"Gamma_m", run.Gamma_m},
                      {"Gamma_e", run.Gamma_e},
                      {"file", name},
                      {"T_values", run.T_values},
                      {"n_eff", run.peaks.n_eff},
                      {"coherence", run.coherence},
                      {"max_trace_drift", run.max_trace_drift},
                      {"min_eigenvalue", run.min_eigenvalue}});
    }
    s.report = {{"t_half_pi", r.t_half_pi}, {"runs", runs}};
  } else if (cfg.scenario == "coherence-scaling") {
    const auto pts = coherence_scaling(cfg);
    std::vector<std::vector<double>> rows;
    for (const auto& pt : pts) {
      rows.push_back({static_cast<double>(pt.twice_I), static_cast<double>(pt.twice_I + 1), pt.coherence, pt.analytic});
    }
    io::write_table(emit("coherence_scaling.csv"), {"twice_I", "d", "coherence", "analytic"}, rows,
                    "Gamma_m=" + rate_tag(cfg.coherence_scaling.Gamma_m) + " t=" + rate_tag(cfg.coherence_scaling.t));
    bool decreasing = true;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].twice_I > pts[i - 1].twice_I && !(pts[i].coherence < pts[i - 1].coherence)) decreasing = false;
    }
    s.report = {{"points", rows.size()}, {"strictly_decreasing", decreasing}};
  } else if (cfg.scenario == "tact") {
    const auto runs = tact_oat_comparison(cfg);
    json arr = json::array();
    for (const auto& r : runs) {
      const std::string stem = "tact_eta" + rate_tag(r.eta) + "_B0_" + rate_tag(rad_to_hz(r.gamma_B0)) + "hz";
      io::write_size_series(emit(stem + ".csv"), r.series);
      json snaps = json::array();
      for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
        const std::string name = stem + "_husimi" + std::to_string(k) + ".csv";
        io::write_husimi(emit(name), r.snapshots[k].second);
        snaps.push_back({{"t", r.snapshots[k].first}, {"file", name}});
      }
      arr.push_back({{"eta", r.eta},
                     {"gamma_B0_hz", rad_to_hz(r.gamma_B0)},
                     {"observable", r.observable},
                     {"max_n_eff_over_2I", r.max_relative_size},
                     {"file", stem + ".csv"},
                     {"snapshots", snaps}});
    }
    s.report = {{"runs", arr}};
  } else if (cfg.scenario == "husimi") {
    const auto snaps = husimi_snapshots(cfg);
    json arr = json::array();
    for (const auto& sn : snaps) {
      const std::string name = "husimi_" + sn.label + ".csv";
      io::write_husimi(emit(name), sn.grid);
      arr.push_back({{"label", sn.label}, {"t", sn.time}, {"file", name}, {"integral", sn.integral}});
    }
    s.report = {{"snapshots", arr}};
  } else {
    throw std::invalid_argument("unknown scenario '" + cfg.scenario + "'");
  }
  return s;
}

}  // namespace spincat
