#include "stagioni/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>

namespace stagioni::sim {

namespace {

double trace_value_at(const std::vector<TracePoint>& trace, double t) {
  double v = trace.front().value;
  for (const auto& p : trace) {
    if (p.time_s <= t + 1e-12)
      v = p.value;
    else
      break;
  }
  return v;
}

std::string with_time_context(double t, const char* what) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "at t=%.3f s: %s", t, what);
  return std::string(buf);
}

}  // namespace

energy::PowerProfile Scenario::resolve_profile() const {
  energy::PowerProfile p =
      custom_profile ? *custom_profile : energy::find_profile(workload);
  if (nsp_power_w) p = p.with_nsp_power(*nsp_power_w, table);
  if (p_cap_near_w) p.p_cap_near_w = *p_cap_near_w;
  return p;
}

void Scenario::validate(std::vector<std::string>* warnings) const {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("scenario: duration must be positive");
  if (!(frame_period_s > 0.0))
    throw std::invalid_argument("scenario: frame period must be positive");
  if (stop_frames < 1)
    throw std::invalid_argument("scenario: stop time must be at least one frame");
  for (const auto* trace : {&ambient_trace, &lighting_trace}) {
    if (trace->empty())
      throw std::invalid_argument("scenario: environment traces must not be empty");
    for (size_t i = 1; i < trace->size(); ++i) {
      if ((*trace)[i].time_s <= (*trace)[i - 1].time_s)
        throw std::invalid_argument("scenario: trace times must be strictly increasing");
    }
  }
  for (double t : trigger_times_s) {
    if (t < 0.0 || t >= duration_s)
      throw std::invalid_argument("scenario: trigger times must lie within the run");
  }
  if (random_trigger_count < 0)
    throw std::invalid_argument("scenario: random trigger count must be non-negative");

  const bool has_triggers = !trigger_times_s.empty() || random_trigger_count > 0;
  if (has_triggers && explicit_bounds_c)
    throw std::invalid_argument(
        "scenario: on-demand triggers require fidelity-derived boundaries, "
        "not explicit t_high/t_low overrides");
  if (has_triggers && !fidelity.imaging_snr_db)
    throw std::invalid_argument(
        "scenario: on-demand triggers require an imaging_snr requirement");
  if (explicit_bounds_c && !(explicit_bounds_c->second < explicit_bounds_c->first))
    throw std::invalid_argument("scenario: explicit t_low must be below t_high");

  fidelity.validate();
  table.validate();
  noise.validate();
  const energy::PowerProfile profile = resolve_profile();
  profile.validate(table);
  if (policy == policy::PolicyKind::seasonal_migration && !profile.far_vpu_available)
    throw std::invalid_argument(
        "scenario: seasonal migration requires a far-sensor VPU in the profile");
  stack.validate(warnings, profile.p_nsp_near_sensor_w(table));
}

namespace {

struct Engine {
  const Scenario& sc;
  RowObserver* observer;

  energy::PowerProfile profile;
  double p_nsp_near = 0.0;
  double p_nsp_system = 0.0;
  double p_cap_far_system = 0.0;
  double p_sensing = 0.0;
  double e_switch_j = 0.0;

  std::vector<double> triggers;
  ScenarioTrace out;

  // accumulators
  double energy_j = 0.0;
  double nsp_time_s = 0.0;
  std::int64_t switches = 0;

  // steady-oscillation bookkeeping: snapshots at each switch into NSP
  struct NspMark {
    double time_s;
    double nsp_time_s;
    std::int64_t switches;
  };
  std::vector<NspMark> nsp_marks;

  explicit Engine(const Scenario& s, RowObserver* obs)
      : sc(s), observer(obs), profile(s.resolve_profile()) {
    p_nsp_near = profile.p_nsp_near_sensor_w(sc.table);
    p_nsp_system = profile.p_nsp_system_w(sc.table);
    p_cap_far_system = profile.p_cap_far_system_w(sc.table);
    p_sensing = profile.p_sensing_w(sc.table);
    e_switch_j =
        policy::migration_handshake(sc.switch_overlap_s, p_nsp_system,
                                    p_cap_far_system)
            .energy_j;

    triggers = sc.trigger_times_s;
    if (sc.random_trigger_count > 0) {
      std::mt19937_64 rng(sc.rng_seed);
      std::uniform_real_distribution<double> dist(0.0, sc.duration_s);
      for (int i = 0; i < sc.random_trigger_count; ++i)
        triggers.push_back(dist(rng));
    }
    std::sort(triggers.begin(), triggers.end());
  }

  policy::Boundaries derive(double ambient_c, double lux, double now_s) const {
    if (sc.explicit_bounds_c) {
      policy::Boundaries b;
      b.t_vision_c = sc.explicit_bounds_c->first;
      b.t_high_c = sc.explicit_bounds_c->first;
      b.t_low_c = sc.explicit_bounds_c->second;
      return b;
    }
    const fidelity::CameraSettings settings = fidelity::settings_for_lux(lux);
    try {
      return policy::derive_boundaries(sc.fidelity, settings, sc.noise, sc.stack,
                                       profile, sc.table, ambient_c, sc.policy,
                                       sc.gap);
    } catch (const fidelity::InfeasibleFidelityError& e) {
      throw fidelity::InfeasibleFidelityError(with_time_context(now_s, e.what()));
    }
  }

  double thermal_power(policy::Mode mode) const {
    if (sc.policy == policy::PolicyKind::full_far) return p_sensing;
    return mode == policy::Mode::nsp ? p_nsp_near : profile.p_cap_near_w;
  }

  double system_power(policy::Mode mode) const {
    switch (sc.policy) {
      case policy::PolicyKind::full_far:
        return p_cap_far_system;
      case policy::PolicyKind::stop_capture_go:
        return mode == policy::Mode::nsp ? p_nsp_system
                                         : profile.p_cap_idle_system_w();
      case policy::PolicyKind::seasonal_migration:
        return mode == policy::Mode::nsp ? p_nsp_system : p_cap_far_system;
    }
    return 0.0;
  }

  void emit(TraceRow&& row) {
    if (observer) observer->on_row(row);
    if (sc.record_rows) out.rows.push_back(std::move(row));
  }

  ScenarioTrace run() {
    const double fp = sc.frame_period_s;
    const std::int64_t frames_total =
        static_cast<std::int64_t>(std::floor(sc.duration_s / fp + 1e-9));
    out.metrics.frames_total = frames_total;

    double ambient = trace_value_at(sc.ambient_trace, 0.0);
    double lux = trace_value_at(sc.lighting_trace, 0.0);
    fidelity::CameraSettings settings = fidelity::settings_for_lux(lux);

    policy::Boundaries bounds = derive(ambient, lux, 0.0);
    out.metrics.boundaries.push_back({0.0, bounds.t_high_c, bounds.t_low_c});
    policy::Controller controller(sc.policy, bounds, sc.stop_frames);

    thermal::ThermalState state;
    state.t_pkg_c = sc.initial_t_pkg_c.value_or(ambient);
    state.t_die_c = sc.initial_t_die_c.value_or(state.t_pkg_c);
    state.time_s = 0.0;

    const double dt_target = std::min(fp, sc.stack.tau_die_s / 5.0);
    const int subs_per_frame =
        std::max(1, static_cast<int>(std::ceil(fp / dt_target - 1e-9)));
    const double dt = fp / subs_per_frame;

    size_t trigger_idx = 0;

    // Initial row: starting state under the first frame's (pre-tick) mode.
    {
      TraceRow r;
      r.time_s = 0.0;
      r.mode = controller.mode();
      r.site = controller.site();
      r.t_die_c = state.t_die_c;
      r.t_pkg_c = state.t_pkg_c;
      r.p_system_w = system_power(controller.mode());
      emit(std::move(r));
    }

    for (std::int64_t f = 0; f < frames_total; ++f) {
      const double t0 = static_cast<double>(f) * fp;
      std::string frame_events;
      auto add_event = [&frame_events](const char* e) {
        if (!frame_events.empty()) frame_events += ';';
        frame_events += e;
      };

      // Environment updates take effect at frame boundaries; boundary
      // derivation follows the traces.
      const double ambient_now = trace_value_at(sc.ambient_trace, t0);
      const double lux_now = trace_value_at(sc.lighting_trace, t0);
      if (ambient_now != ambient || lux_now != lux) {
        if (ambient_now != ambient) add_event("ambient_change");
        if (lux_now != lux) add_event("lighting_change");
        ambient = ambient_now;
        lux = lux_now;
        settings = fidelity::settings_for_lux(lux);
        bounds = derive(ambient, lux, t0);
        controller.set_boundaries(bounds);
        out.metrics.boundaries.push_back({t0, bounds.t_high_c, bounds.t_low_c});
      }

      const policy::FrameDecision decision = controller.tick(t0, state.t_die_c);
      if (decision.switched) {
        ++switches;
        if (sc.policy == policy::PolicyKind::seasonal_migration) {
          add_event(decision.mode == policy::Mode::cap ? "migrate_far"
                                                       : "migrate_near");
        } else {
          add_event(decision.mode == policy::Mode::cap ? "stop" : "resume");
        }
        if (decision.mode == policy::Mode::nsp) {
          nsp_marks.push_back({t0, nsp_time_s, switches});
        }
      }

      const double p_thermal = thermal_power(decision.mode);
      const double p_system = system_power(decision.mode);

      for (int k = 0; k < subs_per_frame; ++k) {
        std::string events = (k == 0) ? frame_events : std::string();
        auto add_sub_event = [&events](const char* e) {
          if (!events.empty()) events += ';';
          events += e;
        };

        const double sub_end = t0 + (k + 1) * dt;
        while (trigger_idx < triggers.size() &&
               triggers[trigger_idx] <= sub_end + 1e-12) {
          controller.request_capture(triggers[trigger_idx]);
          ++trigger_idx;
          ++out.metrics.triggers_delivered;
          add_sub_event("trigger");
        }

        state = thermal::transient_step(sc.stack, state, p_thermal, ambient, dt);

        if (controller.capture_ready(state.t_die_c)) {
          const double trigger_time = controller.complete_capture();
          out.metrics.captures.push_back(
              {state.time_s, state.t_die_c,
               fidelity::snr_db(sc.noise, settings, state.t_die_c),
               trigger_time});
          add_sub_event("capture");
        }

        // Migration handshake energy shows up as a spike on the switch frame.
        double p_row = p_system;
        if (k == 0 && decision.switched &&
            sc.policy == policy::PolicyKind::seasonal_migration) {
          p_row += e_switch_j / dt;
        }

        energy_j += p_row * dt;
        if (decision.mode == policy::Mode::nsp) nsp_time_s += dt;

        TraceRow r;
        r.time_s = state.time_s;
        r.mode = decision.mode;
        r.site = decision.site;
        r.t_die_c = state.t_die_c;
        r.t_pkg_c = state.t_pkg_c;
        r.p_system_w = p_row;
        r.event = std::move(events);
        emit(std::move(r));
      }

      // A stopped frame counts as dropped for processing purposes even when
      // it doubles as an on-demand capture.
      if (decision.action == policy::FrameAction::drop) {
        ++out.metrics.frames_dropped;
      }
    }

    // Tail shorter than one frame: thermal and power continue in the last
    // mode without a controller decision.
    const double tail = sc.duration_s - static_cast<double>(frames_total) * fp;
    if (tail > 1e-9) {
      const double p_thermal = thermal_power(controller.mode());
      const double p_system = system_power(controller.mode());
      state = thermal::transient_step(sc.stack, state, p_thermal, ambient, tail);
      energy_j += p_system * tail;
      if (controller.mode() == policy::Mode::nsp) nsp_time_s += tail;
      TraceRow r;
      r.time_s = state.time_s;
      r.mode = controller.mode();
      r.site = controller.site();
      r.t_die_c = state.t_die_c;
      r.t_pkg_c = state.t_pkg_c;
      r.p_system_w = p_system;
      emit(std::move(r));
    }

    Metrics& m = out.metrics;
    m.avg_power_w = energy_j / sc.duration_s;
    m.duty_cycle = nsp_time_s / sc.duration_s;
    m.migrations_per_s = static_cast<double>(switches) / sc.duration_s;
    if (nsp_marks.size() >= 2) {
      const NspMark& a = nsp_marks.front();
      const NspMark& b = nsp_marks.back();
      const double span = b.time_s - a.time_s;
      m.duty_cycle_steady = (b.nsp_time_s - a.nsp_time_s) / span;
      m.migrations_per_s_steady =
          static_cast<double>(b.switches - a.switches) / span;
    } else {
      m.duty_cycle_steady = m.duty_cycle;
      m.migrations_per_s_steady = m.migrations_per_s;
    }
    return std::move(out);
  }
};

}  // namespace

ScenarioTrace run(const Scenario& scenario, RowObserver* observer) {
  scenario.validate();
  Engine engine(scenario, observer);
  return engine.run();
}

std::optional<SweepAxis> parse_axis(const std::string& name) {
  if (name == "nsp_power") return SweepAxis::nsp_power;
  if (name == "fidelity_snr") return SweepAxis::fidelity_snr;
  if (name == "ambient") return SweepAxis::ambient;
  if (name == "gap") return SweepAxis::gap;
  return std::nullopt;
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::nsp_power: return "nsp_power";
    case SweepAxis::fidelity_snr: return "fidelity_snr";
    case SweepAxis::ambient: return "ambient";
    case SweepAxis::gap: return "gap";
  }
  return "?";
}

namespace {

Scenario apply_axis(const Scenario& base, SweepAxis axis, const SweepValue& v) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::nsp_power:
      s.nsp_power_w = v.value;
      break;
    case SweepAxis::fidelity_snr:
      if (v.value) {
        s.fidelity.imaging_snr_db = *v.value;
        s.fidelity.vision_snr_db = std::min(s.fidelity.vision_snr_db, *v.value);
      } else {
        s.fidelity.imaging_snr_db = std::nullopt;  // don't care
      }
      break;
    case SweepAxis::ambient:
      s.ambient_trace = {{0.0, v.value.value_or(25.0)}};
      break;
    case SweepAxis::gap:
      s.gap = policy::GapStrategy::fixed(v.value.value_or(5.0));
      break;
  }
  return s;
}

}  // namespace

std::vector<SweepCell> sweep(const Scenario& base, SweepAxis axis,
                             const std::vector<SweepValue>& values) {
  std::vector<std::future<SweepCell>> futures;
  futures.reserve(values.size());
  for (const SweepValue& v : values) {
    futures.push_back(std::async(std::launch::async, [&base, axis, v]() {
      SweepCell cell;
      cell.axis_value = v;
      try {
        Scenario s = apply_axis(base, axis, v);
        s.record_rows = false;
        cell.metrics = run(s).metrics;
      } catch (const fidelity::InfeasibleFidelityError& e) {
        cell.error = e.what();
        cell.infeasible = true;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      return cell;
    }));
  }
  std::vector<SweepCell> cells;
  cells.reserve(values.size());
  for (auto& f : futures) cells.push_back(f.get());
  return cells;
}

}  // namespace stagioni::sim
