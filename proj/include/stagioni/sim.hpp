#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stagioni/energy.hpp"
#include "stagioni/fidelity.hpp"
#include "stagioni/policy.hpp"
#include "stagioni/thermal.hpp"

namespace stagioni::sim {

/// Piecewise-constant environment trace point: `value` holds from `time_s`
/// until the next point.
struct TracePoint {
  double time_s = 0.0;
  double value = 0.0;
};

/// A complete simulation input: workload, policy, fidelity contract,
/// environment traces, trigger schedule and model overrides.
struct Scenario {
  double duration_s = 60.0;
  double frame_period_s = 1.0 / 30.0;
  std::string workload = "resnet50";
  std::optional<energy::PowerProfile> custom_profile;
  std::optional<double> nsp_power_w;    ///< retarget in-stack NSP power
  std::optional<double> p_cap_near_w;   ///< CAP residual override
  policy::PolicyKind policy = policy::PolicyKind::seasonal_migration;
  policy::FidelitySpec fidelity;
  std::vector<TracePoint> ambient_trace = {{0.0, 25.0}};
  std::vector<TracePoint> lighting_trace = {{0.0, 32000.0}};
  std::vector<double> trigger_times_s;
  int random_trigger_count = 0;
  std::uint64_t rng_seed = 0;
  policy::GapStrategy gap;
  int stop_frames = 1;
  /// Bypass fidelity-driven boundary derivation (no triggers allowed then).
  std::optional<std::pair<double, double>> explicit_bounds_c;  // {t_high, t_low}
  std::optional<double> initial_t_die_c;
  std::optional<double> initial_t_pkg_c;
  double switch_overlap_s = 100e-6;
  bool record_rows = true;

  thermal::ThermalStack stack;
  energy::EnergyTable table;
  fidelity::NoiseModel noise;

  /// Resolves workload/overrides into the effective power profile.
  energy::PowerProfile resolve_profile() const;

  /// Throws std::invalid_argument / policy::ConfigurationError on malformed
  /// scenarios; appends soft issues to `warnings`.
  void validate(std::vector<std::string>* warnings = nullptr) const;
};

struct TraceRow {
  double time_s = 0.0;
  policy::Mode mode = policy::Mode::nsp;
  policy::Site site = policy::Site::near;
  double t_die_c = 0.0;
  double t_pkg_c = 0.0;
  double p_system_w = 0.0;
  std::string event;
};

struct CaptureRecord {
  double time_s = 0.0;
  double t_die_c = 0.0;
  double snr_db = 0.0;
  double trigger_time_s = 0.0;
};

struct BoundaryRecord {
  double time_s = 0.0;
  double t_high_c = 0.0;
  double t_low_c = 0.0;
};

struct Metrics {
  double avg_power_w = 0.0;
  double duty_cycle = 0.0;        ///< NSP time / total time
  double migrations_per_s = 0.0;  ///< mode switches per second, whole run
  std::int64_t frames_total = 0;
  std::int64_t frames_dropped = 0;
  std::vector<CaptureRecord> captures;
  std::vector<BoundaryRecord> boundaries;

  // Steady-oscillation estimators (between the first and last switch into
  // NSP); equal to the whole-run values when fewer than two such switches.
  double duty_cycle_steady = 0.0;
  double migrations_per_s_steady = 0.0;
  std::int64_t triggers_delivered = 0;
};

struct ScenarioTrace {
  std::vector<TraceRow> rows;
  Metrics metrics;
};

/// Streaming hook for callers that need substep-resolution checks without
/// retaining the whole trace.
class RowObserver {
 public:
  virtual ~RowObserver() = default;
  virtual void on_row(const TraceRow& row) = 0;
};

/// Runs a scenario to completion. Deterministic for a given scenario and
/// seed. Rows are retained only when scenario.record_rows is set; the
/// observer (if any) sees every row either way. Infeasible fidelity at any
/// trace point raises fidelity::InfeasibleFidelityError naming the time and
/// settings.
ScenarioTrace run(const Scenario& scenario, RowObserver* observer = nullptr);

enum class SweepAxis { nsp_power, fidelity_snr, ambient, gap };

std::optional<SweepAxis> parse_axis(const std::string& name);
const char* to_string(SweepAxis axis);

/// One sweep point; `axis_value` is empty for the fidelity don't-care cell.
struct SweepValue {
  std::optional<double> value;

  static SweepValue of(double v) { return {v}; }
  static SweepValue dont_care() { return {std::nullopt}; }
};

struct SweepCell {
  SweepValue axis_value;
  Metrics metrics;
  std::string error;  ///< empty on success
  bool infeasible = false;
};

/// One run per value, applied to a copy of the base scenario; cells run
/// concurrently (scenarios share nothing) and are returned in input order.
/// Per-cell errors are captured, not thrown.
std::vector<SweepCell> sweep(const Scenario& base, SweepAxis axis,
                             const std::vector<SweepValue>& values);

}  // namespace stagioni::sim
