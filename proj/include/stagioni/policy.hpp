#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>

#include "stagioni/energy.hpp"
#include "stagioni/fidelity.hpp"
#include "stagioni/thermal.hpp"

namespace stagioni::policy {

enum class PolicyKind { full_far, stop_capture_go, seasonal_migration };
enum class Mode { nsp, cap };
enum class Site { near, far };
enum class FrameAction { process_near, process_far, drop, capture };

const char* to_string(PolicyKind p);
const char* to_string(Mode m);
const char* to_string(Site s);
std::optional<PolicyKind> parse_policy(const std::string& name);

/// Application fidelity contract: continuous vision SNR, optional on-demand
/// imaging SNR (absent = no on-demand captures requested), and the deadline
/// for serving an on-demand capture.
struct FidelitySpec {
  double vision_snr_db = 20.0;
  std::optional<double> imaging_snr_db = 26.0;
  double capture_latency_s = 0.02;

  void validate() const {
    if (!(capture_latency_s > 0.0))
      throw std::invalid_argument("FidelitySpec: capture latency must be positive");
    if (imaging_snr_db && *imaging_snr_db < vision_snr_db)
      throw std::invalid_argument("FidelitySpec: imaging SNR must be >= vision SNR");
  }
};

/// Thermal boundaries derived from the fidelity contract.
/// t_high = min(t_vision, t_imaging + jump achievable within the capture
/// latency); t_low = t_high - gap.
struct Boundaries {
  double t_vision_c = 0.0;
  std::optional<double> t_imaging_c;
  double t_high_c = 0.0;
  double t_low_c = 0.0;
};

/// Gap (t_high - t_low) selection: either a fixed width or a sweep over
/// whole-degree gaps picking the one that minimizes the closed-form average
/// system power for the policy in question.
struct GapStrategy {
  enum class Kind { fixed, optimize } kind = Kind::optimize;
  double fixed_gap_c = 5.0;
  double sweep_min_c = 1.0;
  double sweep_max_c = 15.0;

  static GapStrategy fixed(double gap_c) {
    return {Kind::fixed, gap_c, 1.0, 15.0};
  }
  static GapStrategy optimize() { return GapStrategy{}; }
};

class ConfigurationError : public std::runtime_error {
 public:
  explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

/// Closed-form seasonal schedule: warming/cooling interval lengths, duty
/// cycle (fraction of time in NSP mode) and migration frequency. A
/// configuration whose boundaries sit above the temperature response runs
/// at d = 1 with no migrations.
struct Schedule {
  double t_warming_s = 0.0;
  double t_cooling_s = 0.0;
  double duty_cycle = 1.0;
  double f_migration_hz = 0.0;
  bool throttling = false;  ///< false when the boundaries are never reached
};

/// Pre-copy migration handshake cost: fixed synchronization latency plus
/// dual-active energy over the preparation overlap.
struct SwitchOverhead {
  double latency_s = 100e-6;
  double energy_j = 0.0;
};

SwitchOverhead migration_handshake(double overlap_s, double p_near_w, double p_far_w);

/// Boundary derivation per the fidelity contract. `policy` selects the CAP
/// system power used by the optimizing gap strategy. Infeasible fidelity
/// propagates as fidelity::InfeasibleFidelityError; if no gap in the sweep
/// admits a sustainable oscillation, ConfigurationError is thrown.
Boundaries derive_boundaries(const FidelitySpec& spec,
                             const fidelity::CameraSettings& settings,
                             const fidelity::NoiseModel& noise,
                             const thermal::ThermalStack& stack,
                             const energy::PowerProfile& profile,
                             const energy::EnergyTable& table,
                             double t_ambient_c, PolicyKind policy,
                             const GapStrategy& gap);

/// Closed-form warming/cooling times for a boundary pair. RC is the package
/// time constant; the jump contributes T_jump to the die and takes
/// t_jump = 4 * tau_die. Throws ConfigurationError naming the violated
/// inequality when a log argument is non-positive.
Schedule analytic_schedule(const thermal::ThermalStack& stack,
                           const energy::PowerProfile& profile,
                           const energy::EnergyTable& table,
                           const Boundaries& bounds, double t_ambient_c);

/// d * P_nsp + (1 - d) * P_cap + f_switch * E_switch.
double average_power(double duty_cycle, double p_nsp_system_w,
                     double p_cap_system_w, double f_switch_hz,
                     double e_switch_j);

/// One controller decision, taken once per frame tick.
struct FrameDecision {
  Mode mode = Mode::nsp;
  Site site = Site::near;
  FrameAction action = FrameAction::process_near;
  bool switched = false;  ///< mode/site transition occurred at this tick
};

/// Deterministic per-frame state machine implementing the three policies.
/// Mode decisions are taken once per frame tick by the simulation engine;
/// on-demand capture completion is continuous (the engine polls
/// capture_ready between ticks so a capture lands as soon as the die is
/// cool enough, not at the next frame boundary). Pending requests are
/// served FIFO.
class Controller {
 public:
  Controller(PolicyKind policy, Boundaries bounds, int stop_frames = 1);

  /// Enqueue an on-demand fidelity request (timestamp of the trigger).
  void request_capture(double trigger_time_s);

  /// Situational update (lighting or explicit reconfiguration).
  void set_boundaries(const Boundaries& bounds);

  /// Decide the action for the frame starting at `now_s` given the die
  /// temperature at the frame boundary.
  FrameDecision tick(double now_s, double t_die_c);

  /// True when a pending request can be served at this die temperature.
  bool capture_ready(double t_die_c) const;

  /// Pops the oldest pending request; returns its trigger timestamp.
  double complete_capture();

  PolicyKind policy() const { return policy_; }
  Mode mode() const { return mode_; }
  Site site() const { return site_; }
  const Boundaries& boundaries() const { return bounds_; }
  bool capture_pending() const { return !pending_.empty(); }

 private:
  bool fidelity_met(double t_die_c) const;

  PolicyKind policy_;
  Boundaries bounds_;
  int stop_frames_;
  Mode mode_;
  Site site_;
  int cap_frames_held_ = 0;
  std::deque<double> pending_;  // trigger timestamps, FIFO
};

}  // namespace stagioni::policy
