#include "stagioni/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace stagioni::policy {

namespace {

constexpr double kHandshakeLatencyS = 100e-6;

std::string describe(const char* inequality, double lhs, double rhs) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s (%.3f vs %.3f C)", inequality, lhs, rhs);
  return std::string(buf);
}

}  // namespace

const char* to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::full_far: return "full_far";
    case PolicyKind::stop_capture_go: return "stop_capture_go";
    case PolicyKind::seasonal_migration: return "seasonal_migration";
  }
  return "?";
}

const char* to_string(Mode m) { return m == Mode::nsp ? "nsp" : "cap"; }
const char* to_string(Site s) { return s == Site::near ? "near" : "far"; }

std::optional<PolicyKind> parse_policy(const std::string& name) {
  if (name == "full_far") return PolicyKind::full_far;
  if (name == "stop_capture_go") return PolicyKind::stop_capture_go;
  if (name == "seasonal_migration") return PolicyKind::seasonal_migration;
  return std::nullopt;
}

SwitchOverhead migration_handshake(double overlap_s, double p_near_w, double p_far_w) {
  if (overlap_s < 0.0 || p_near_w < 0.0 || p_far_w < 0.0)
    throw std::domain_error("migration_handshake: arguments must be non-negative");
  SwitchOverhead o;
  o.latency_s = kHandshakeLatencyS;
  o.energy_j = overlap_s * (p_near_w + p_far_w);
  return o;
}

double average_power(double duty_cycle, double p_nsp_system_w,
                     double p_cap_system_w, double f_switch_hz,
                     double e_switch_j) {
  if (duty_cycle < 0.0 || duty_cycle > 1.0)
    throw std::domain_error("average_power: duty cycle must be within [0, 1]");
  return duty_cycle * p_nsp_system_w + (1.0 - duty_cycle) * p_cap_system_w +
         f_switch_hz * e_switch_j;
}

Schedule analytic_schedule(const thermal::ThermalStack& stack,
                           const energy::PowerProfile& profile,
                           const energy::EnergyTable& table,
                           const Boundaries& bounds, double t_ambient_c) {
  const double p_nsp = profile.p_nsp_near_sensor_w(table);
  const double p_cap = profile.p_cap_near_w;
  const double t_ss_nsp = thermal::steady_state(stack, p_nsp, t_ambient_c).t_die_c;
  const double t_ss_cap = thermal::steady_state(stack, p_cap, t_ambient_c).t_die_c;
  const double t_jump = thermal::temperature_jump(stack, p_nsp, p_cap);
  const double t_jump_time = 4.0 * stack.tau_die_s;
  const double rc = stack.tau_pkg_s();

  Schedule s;
  if (t_ss_nsp <= bounds.t_high_c) {
    s.t_warming_s = std::numeric_limits<double>::infinity();
    s.t_cooling_s = 0.0;
    s.duty_cycle = 1.0;
    s.f_migration_hz = 0.0;
    s.throttling = false;
    return s;
  }

  if (!(bounds.t_low_c < bounds.t_high_c))
    throw ConfigurationError(describe("T_low must be below T_high",
                                      bounds.t_low_c, bounds.t_high_c));
  if (!(bounds.t_low_c + t_jump < bounds.t_high_c))
    throw ConfigurationError(describe(
        "gap must exceed the temperature jump: T_low + T_jump must stay below T_high",
        bounds.t_low_c + t_jump, bounds.t_high_c));

  const double warm_num = t_ss_nsp - (bounds.t_low_c + t_jump);
  const double warm_den = t_ss_nsp - bounds.t_high_c;
  if (!(warm_num > 0.0))
    throw ConfigurationError(describe(
        "T_low + T_jump must stay below the NSP steady temperature",
        bounds.t_low_c + t_jump, t_ss_nsp));

  const double cool_num = (bounds.t_high_c - t_jump) - t_ss_cap;
  if (!(cool_num > 0.0))
    throw ConfigurationError(describe(
        "T_high - T_jump must stay above the CAP steady temperature",
        bounds.t_high_c - t_jump, t_ss_cap));
  const double cool_den = bounds.t_low_c - t_ss_cap;
  if (!(cool_den > 0.0))
    throw ConfigurationError(describe(
        "T_low must stay above the CAP steady temperature", bounds.t_low_c,
        t_ss_cap));

  s.t_warming_s = rc * std::log(warm_num / warm_den) + t_jump_time;
  s.t_cooling_s = rc * std::log(cool_num / cool_den) + t_jump_time;
  s.duty_cycle = s.t_warming_s / (s.t_warming_s + s.t_cooling_s);
  s.f_migration_hz = 2.0 / (s.t_warming_s + s.t_cooling_s);
  s.throttling = true;
  return s;
}

namespace {

/// CAP-mode system power as seen by the gap optimizer for each policy.
double cap_system_power(PolicyKind policy, const energy::PowerProfile& profile,
                        const energy::EnergyTable& table) {
  switch (policy) {
    case PolicyKind::stop_capture_go:
      return profile.p_cap_idle_system_w();
    case PolicyKind::seasonal_migration:
    case PolicyKind::full_far:
      return profile.p_cap_far_system_w(table);
  }
  return 0.0;
}

double switch_energy(PolicyKind policy, const energy::PowerProfile& profile,
                     const energy::EnergyTable& table) {
  if (policy != PolicyKind::seasonal_migration) return 0.0;  // clock gating
  return migration_handshake(kHandshakeLatencyS, profile.p_nsp_system_w(table),
                             profile.p_cap_far_system_w(table))
      .energy_j;
}

}  // namespace

Boundaries derive_boundaries(const FidelitySpec& spec,
                             const fidelity::CameraSettings& settings,
                             const fidelity::NoiseModel& noise,
                             const thermal::ThermalStack& stack,
                             const energy::PowerProfile& profile,
                             const energy::EnergyTable& table,
                             double t_ambient_c, PolicyKind policy,
                             const GapStrategy& gap) {
  spec.validate();

  Boundaries b;
  b.t_vision_c = fidelity::threshold_temperature(noise, settings, spec.vision_snr_db);
  b.t_high_c = b.t_vision_c;
  if (spec.imaging_snr_db) {
    b.t_imaging_c =
        fidelity::threshold_temperature(noise, settings, *spec.imaging_snr_db);
    const double full_jump = thermal::temperature_jump(
        stack, profile.p_nsp_near_sensor_w(table), profile.p_cap_near_w);
    const double reachable =
        thermal::jump_within_latency(stack, full_jump, spec.capture_latency_s);
    b.t_high_c = std::min(b.t_vision_c, *b.t_imaging_c + reachable);
  }

  if (gap.kind == GapStrategy::Kind::fixed || policy == PolicyKind::full_far) {
    if (!(gap.fixed_gap_c > 0.0))
      throw ConfigurationError("boundary gap must be positive");
    b.t_low_c = b.t_high_c - gap.fixed_gap_c;
    return b;
  }

  // Sweep whole-degree gaps and keep the one minimizing the closed-form
  // average system power; gaps whose schedule is not sustainable are skipped.
  const double p_nsp_sys = profile.p_nsp_system_w(table);
  const double p_cap_sys = cap_system_power(policy, profile, table);
  const double e_switch = switch_energy(policy, profile, table);

  std::optional<double> best_gap;
  double best_power = std::numeric_limits<double>::infinity();
  std::string last_error = "gap sweep produced no candidates";
  for (double g = gap.sweep_min_c; g <= gap.sweep_max_c + 1e-9; g += 1.0) {
    Boundaries candidate = b;
    candidate.t_low_c = b.t_high_c - g;
    try {
      const Schedule s = analytic_schedule(stack, profile, table, candidate, t_ambient_c);
      const double p = average_power(s.duty_cycle, p_nsp_sys, p_cap_sys,
                                     s.f_migration_hz, e_switch);
      if (p < best_power - 1e-12) {
        best_power = p;
        best_gap = g;
      }
    } catch (const ConfigurationError& e) {
      last_error = e.what();
    }
  }
  if (!best_gap)
    throw ConfigurationError("no sustainable gap in sweep: " + last_error);
  b.t_low_c = b.t_high_c - *best_gap;
  return b;
}

Controller::Controller(PolicyKind policy, Boundaries bounds, int stop_frames)
    : policy_(policy),
      bounds_(bounds),
      stop_frames_(std::max(1, stop_frames)),
      mode_(policy == PolicyKind::full_far ? Mode::cap : Mode::nsp),
      site_(policy == PolicyKind::full_far ? Site::far : Site::near) {}

void Controller::request_capture(double trigger_time_s) {
  pending_.push_back(trigger_time_s);
}

void Controller::set_boundaries(const Boundaries& bounds) { bounds_ = bounds; }

bool Controller::fidelity_met(double t_die_c) const {
  if (!bounds_.t_imaging_c) return true;
  return t_die_c <= *bounds_.t_imaging_c;
}

bool Controller::capture_ready(double t_die_c) const {
  return !pending_.empty() && fidelity_met(t_die_c);
}

double Controller::complete_capture() {
  const double t = pending_.front();
  pending_.pop_front();
  return t;
}

FrameDecision Controller::tick(double /*now_s*/, double t_die_c) {
  FrameDecision d;
  const bool want_capture = !pending_.empty();

  switch (policy_) {
    case PolicyKind::full_far:
      d.mode = Mode::cap;
      d.site = Site::far;
      d.action = FrameAction::process_far;
      return d;

    case PolicyKind::stop_capture_go: {
      if (mode_ == Mode::nsp) {
        if (want_capture || t_die_c >= bounds_.t_high_c) {
          mode_ = Mode::cap;
          cap_frames_held_ = 1;
          d.switched = true;
          d.action = FrameAction::drop;
        } else {
          d.action = FrameAction::process_near;
        }
      } else {
        const bool stop_served = cap_frames_held_ >= stop_frames_;
        if (stop_served && !want_capture && t_die_c <= bounds_.t_low_c) {
          mode_ = Mode::nsp;
          cap_frames_held_ = 0;
          d.switched = true;
          d.action = FrameAction::process_near;
        } else {
          ++cap_frames_held_;
          d.action = FrameAction::drop;
        }
      }
      d.mode = mode_;
      d.site = Site::near;
      return d;
    }

    case PolicyKind::seasonal_migration: {
      if (mode_ == Mode::nsp && (want_capture || t_die_c >= bounds_.t_high_c)) {
        mode_ = Mode::cap;
        site_ = Site::far;
        d.switched = true;
      } else if (mode_ == Mode::cap && !want_capture &&
                 t_die_c <= bounds_.t_low_c) {
        mode_ = Mode::nsp;
        site_ = Site::near;
        d.switched = true;
      }
      d.mode = mode_;
      d.site = site_;
      d.action = (mode_ == Mode::nsp) ? FrameAction::process_near
                                      : FrameAction::process_far;
      return d;
    }
  }
  return d;
}

}  // namespace stagioni::policy
