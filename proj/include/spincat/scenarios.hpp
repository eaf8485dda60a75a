#pragma once

// Config-driven experiments: free one-axis twisting, the Ramsey-like cat
// protocol, virtual-phase cats, the Givens baseline, decoherence sweeps,
// coherence-vs-dimension scaling, TACT/OAT comparison and Husimi snapshots.
//
// ScenarioConfig holds SI values (rad/s, s); the JSON form takes frequencies in
// Hz and converts at the boundary. Decoherence rates are plain 1/s.

#include "spincat/control.hpp"
#include "spincat/dynamics.hpp"
#include "spincat/hamiltonian.hpp"
#include "spincat/io.hpp"
#include "spincat/observables.hpp"

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace spincat {

enum class PhaseRule { fixed, rotating };

struct OatParams {
  std::optional<double> t_end;  // default pi / |w_eff|
  int samples = 201;
  std::string observable = "Iy";
};

struct RamseyParams {
  double T_start = 0.0;
  double T_stop = 25e-6;
  double T_step = 0.25e-6;
  PhaseRule phase_rule = PhaseRule::rotating;
  std::optional<double> reference_omega;  // rad/s, default gamma_B0
  std::string observable = "Iz";
};

struct VirtualPhaseParams {
  double phi = 0.0;
  std::optional<double> T;  // default pi / (2 w_eff)
};

struct DecoherenceSweepParams {
  std::vector<double> Gamma_m_list{0.0, 10.0};
  std::vector<double> Gamma_e_list{0.0, 0.1};
  int n_peaks = 6;
  int peak_stride_periods = 400;  // revival periods between sampled peaks
};

struct CoherenceScalingParams {
  std::vector<int> twice_I_list{1, 2, 3, 4, 5, 6, 7, 8, 9};
  double Gamma_m = 1000.0;
  double t = 1e-3;
};

struct TactParams {
  std::vector<double> eta_list{0.0, 1.0};
  std::vector<double> gamma_B0_list{0.0, hz_to_rad(8.25e6)};  // rad/s
  double periods = 1.0;                                       // in units of pi / w_q
  double sample_interval = 1e-8;
  std::vector<double> snapshot_times;
  int n_theta = 91;
  int n_phi = 181;
};

struct HusimiParams {
  std::string state = "oat";  // cat | coherent | oat
  std::vector<double> times;  // oat snapshot times; default pi / (2 w_eff)
  double theta = 0.5 * std::numbers::pi;
  double phi = 0.0;
  int n_theta = 181;
  int n_phi = 361;
};

struct ScenarioConfig {
  std::string scenario = "oat";
  SpinQuantum spin{7};
  FieldSpec fields{hz_to_rad(8.25e6), hz_to_rad(800.0), DriveAxis::x};
  QuadrupoleSpec quadrupole{hz_to_rad(40e3), 0.0, {}};
  DecoherenceSpec decoherence{};
  std::optional<Frame> frame;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::string output_dir = "out";

  OatParams oat;
  RamseyParams ramsey;
  VirtualPhaseParams virtual_phase;
  DecoherenceSweepParams decoherence_sweep;
  CoherenceScalingParams coherence_scaling;
  TactParams tact;
  HusimiParams husimi;

  void validate() const;
  double omega_q_eff() const { return effective_oat_strength(quadrupole, spin); }
};

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"oat",   "ramsey",         "virtual-phase", "givens", "decoherence",
                                              "coherence-scaling", "tact", "husimi"};
  return names;
}

ScenarioConfig config_from_json(const io::json& doc);
io::json config_to_json(const ScenarioConfig& cfg);

/// Default integrator step for a frame: 1 ns in the lab, 100 ns otherwise.
double default_dt(Frame frame);

/// Spin operator named x|y|z (or Ix|Iy|Iz).
Operator named_operator(const SpinQuantum& spin, const std::string& name);

/// Ordered parallel map over [0, n): each index runs independently, results are
/// returned in index order, and the lowest-index exception is rethrown.
template <class Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using R = decltype(fn(std::size_t{}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) {
        try {
          slots[i].emplace(fn(i));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

// --- scenario results ----------------------------------------------------------

struct OatResult {
  SizeSeries series;
  double omega_q_eff = 0.0;
  double peak_n_eff = 0.0;
  double peak_time = 0.0;
  double n_eff_at_half_period = 0.0;  // t = pi / (2 w_eff)
  double n_eff_at_period = 0.0;       // t = pi / w_eff
  PureState final_state{Vector::Ones(1)};
};

struct RamseyResult {
  SizeSeries series;  // times hold T
  std::vector<PureState> final_states;
  std::vector<double> delta_phi;
  double t_half_pi = 0.0;
  double omega_ref = 0.0;
};

struct VirtualPhaseResult {
  PulseSchedule schedule;
  std::vector<double> first_phases;
  std::vector<double> second_phases;
  double T = 0.0;
  double fidelity = 0.0;         // against the free-evolution protocol
  double framed_fidelity = 0.0;  // after the diagonal frame of the virtual update
  double n_eff = 0.0;            // Iz
  PureState final_state{Vector::Ones(1)};
  PureState reference_state{Vector::Ones(1)};
};

struct GivensResult {
  PulseSchedule create;
  PulseSchedule collapse;
  std::vector<double> create_populations;
  PureState create_state{Vector::Ones(1)};
  PureState collapse_state{Vector::Ones(1)};
  double collapse_fidelity = 0.0;  // against |I,-I>
  double create_duration = 0.0;
  double collapse_duration = 0.0;
  double oat_period = 0.0;
};

struct DecoherenceRun {
  double Gamma_m = 0.0;
  double Gamma_e = 0.0;
  SizeSeries peaks;  // times hold elapsed protocol time
  std::vector<double> T_values;
  std::vector<double> coherence;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
};

struct DecoherenceResult {
  std::vector<DecoherenceRun> runs;
  double t_half_pi = 0.0;
};

struct CoherencePoint {
  int twice_I = 0;
  double coherence = 0.0;
  double analytic = 0.0;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
};

struct TactRun {
  double eta = 0.0;
  double gamma_B0 = 0.0;
  std::string observable;
  SizeSeries series;
  double max_relative_size = 0.0;  // max N_eff / 2I
  std::vector<std::pair<double, HusimiGrid>> snapshots;
};

struct HusimiSnapshot {
  std::string label;
  double time = 0.0;
  HusimiGrid grid;
  double integral = 0.0;
};

OatResult oat_free_evolution(const ScenarioConfig& cfg);
RamseyResult ramsey_cat_protocol(const ScenarioConfig& cfg);
VirtualPhaseResult virtual_phase_cat(const ScenarioConfig& cfg);
GivensResult givens_baseline(const ScenarioConfig& cfg);
DecoherenceResult decoherence_sweep(const ScenarioConfig& cfg);
std::vector<CoherencePoint> coherence_scaling(const ScenarioConfig& cfg);
std::vector<TactRun> tact_oat_comparison(const ScenarioConfig& cfg);
std::vector<HusimiSnapshot> husimi_snapshots(const ScenarioConfig& cfg);

/// The ideal cat (|I,I> + |I,-I>) / sqrt(2).
PureState ideal_cat(const SpinQuantum& spin);

struct RunSummary {
  std::vector<std::filesystem::path> outputs;
  io::json report;
};

/// Runs cfg.scenario and writes its tables into `out_dir`.
RunSummary run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace spincat
