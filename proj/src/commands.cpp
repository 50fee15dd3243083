#include "stagioni/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stagioni/config.hpp"

namespace stagioni::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return std::string(buf);
}

json metrics_to_json(const sim::Metrics& m) {
  json j;
  j["avg_power_w"] = m.avg_power_w;
  j["duty_cycle"] = m.duty_cycle;
  j["migrations_per_s"] = m.migrations_per_s;
  j["frames_total"] = m.frames_total;
  j["frames_dropped"] = m.frames_dropped;
  j["captures"] = json::array();
  for (const auto& c : m.captures) {
    j["captures"].push_back(
        {{"time_s", c.time_s}, {"t_die_c", c.t_die_c}, {"snr_db", c.snr_db}});
  }
  j["boundaries"] = json::array();
  for (const auto& b : m.boundaries) {
    j["boundaries"].push_back({{"time_s", b.time_s},
                               {"t_high_c", b.t_high_c},
                               {"t_low_c", b.t_low_c}});
  }
  return j;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<sim::TraceRow>& rows) {
  out << kTraceCsvHeader << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f,%s,%s,%.4f,%.4f,%.6f,%s", r.time_s,
                  policy::to_string(r.mode), policy::to_string(r.site),
                  r.t_die_c, r.t_pkg_c, r.p_system_w, r.event.c_str());
    out << buf << '\n';
  }
}

void write_metrics_json(std::ostream& out, const sim::Metrics& metrics) {
  out << metrics_to_json(metrics).dump(2) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<sim::SweepCell>& cells) {
  out << "axis_value,metric,value\n";
  auto row = [&out](const std::string& axis_value, const char* metric, double v) {
    out << axis_value << ',' << metric << ',' << fmt("%.6g", v) << '\n';
  };
  for (const auto& c : cells) {
    const std::string axis_value =
        c.axis_value.value ? fmt("%.6g", *c.axis_value.value) : std::string("none");
    if (!c.error.empty()) {
      row(axis_value, "error", 1.0);
      continue;
    }
    row(axis_value, "avg_power_w", c.metrics.avg_power_w);
    row(axis_value, "duty_cycle", c.metrics.duty_cycle);
    row(axis_value, "migrations_per_s", c.metrics.migrations_per_s);
    row(axis_value, "frames_total", static_cast<double>(c.metrics.frames_total));
    row(axis_value, "frames_dropped", static_cast<double>(c.metrics.frames_dropped));
    row(axis_value, "captures", static_cast<double>(c.metrics.captures.size()));
  }
}

namespace {

int classify_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return kExitConfigError;
}

sim::Scenario load_scenario(const std::string& config_ref) {
  return config::load_file(config::resolve_config_path(config_ref));
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  sim::Scenario scenario;
  try {
    scenario = load_scenario(opt.config);
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  if (opt.format != "csv" && opt.format != "json") {
    err << "error: unknown trace format '" << opt.format << "' (csv or json)\n";
    return kExitConfigError;
  }

  sim::ScenarioTrace trace;
  try {
    trace = sim::run(scenario);
  } catch (const fidelity::InfeasibleFidelityError& e) {
    err << "infeasible fidelity: " << e.what() << '\n';
    return kExitInfeasibleFidelity;
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  try {
    fs::create_directories(opt.out_dir);
    const fs::path dir(opt.out_dir);
    if (opt.format == "csv") {
      std::ofstream f(dir / "trace.csv");
      write_trace_csv(f, trace.rows);
    } else {
      std::ofstream f(dir / "trace.json");
      json rows = json::array();
      for (const auto& r : trace.rows) {
        rows.push_back({{"time_s", r.time_s},
                        {"mode", policy::to_string(r.mode)},
                        {"site", policy::to_string(r.site)},
                        {"t_die_c", r.t_die_c},
                        {"t_pkg_c", r.t_pkg_c},
                        {"p_system_w", r.p_system_w},
                        {"event", r.event}});
      }
      f << rows.dump(2) << '\n';
    }
    std::ofstream f(dir / "metrics.json");
    write_metrics_json(f, trace.metrics);
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  const auto& m = trace.metrics;
  out << "policy " << policy::to_string(scenario.policy) << " on "
      << scenario.resolve_profile().name << ": avg power "
      << fmt("%.3f", m.avg_power_w) << " W, duty cycle "
      << fmt("%.3f", m.duty_cycle) << ", " << m.frames_dropped << "/"
      << m.frames_total << " frames dropped, " << m.captures.size()
      << " captures\n";
  return kExitOk;
}

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  sim::Scenario base;
  std::optional<sim::SweepAxis> axis;
  std::vector<sim::SweepValue> values;
  try {
    base = load_scenario(opt.config);
    axis = sim::parse_axis(opt.axis);
    if (!axis)
      throw config::ConfigError("unknown sweep axis '" + opt.axis +
                                "' (nsp_power, fidelity_snr, ambient, gap)");
    if (opt.values.empty()) throw config::ConfigError("sweep needs --values");
    for (const std::string& v : opt.values) {
      if (v == "none") {
        if (*axis != sim::SweepAxis::fidelity_snr)
          throw config::ConfigError("'none' is only meaningful on the fidelity_snr axis");
        values.push_back(sim::SweepValue::dont_care());
      } else {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size())
          throw config::ConfigError("bad sweep value '" + v + "'");
        values.push_back(sim::SweepValue::of(x));
      }
    }
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  const std::vector<sim::SweepCell> cells = sim::sweep(base, *axis, values);

  try {
    fs::create_directories(opt.out_dir);
    std::ofstream f(fs::path(opt.out_dir) / "sweep.csv");
    write_sweep_csv(f, cells);
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  int rc = kExitOk;
  for (const auto& c : cells) {
    if (c.error.empty()) continue;
    err << "cell " << (c.axis_value.value ? fmt("%.6g", *c.axis_value.value) : "none")
        << ": " << c.error << '\n';
    if (c.infeasible && rc != kExitConfigError) rc = kExitInfeasibleFidelity;
    if (!c.infeasible) rc = kExitConfigError;
  }
  out << cells.size() << " sweep cells written\n";
  return rc;
}

int cmd_fidelity_curve(const CurveOptions& opt, std::ostream& out, std::ostream& err) {
  fidelity::NoiseModel noise = fidelity::NoiseModel::defaults();
  try {
    if (!opt.config.empty()) noise = load_scenario(opt.config).noise;
    if (!(opt.step_c > 0.0) || opt.to_c < opt.from_c)
      throw config::ConfigError("bad temperature range");

    fidelity::CameraSettings settings = fidelity::settings_for_lux(opt.lux);
    if (opt.exposure_ms) settings.exposure_ms = *opt.exposure_ms;
    if (opt.iso) settings.iso = *opt.iso;
    settings.validate();

    std::ofstream file;
    std::ostream* dst = &out;
    if (!opt.out_path.empty()) {
      file.open(opt.out_path);
      if (!file) throw config::ConfigError("cannot open " + opt.out_path);
      dst = &file;
    }
    *dst << "t_die_c,variance,snr_db\n";
    for (double t = opt.from_c; t <= opt.to_c + 1e-9; t += opt.step_c) {
      *dst << fmt("%.2f", t) << ','
           << fmt("%.6g", fidelity::noise_variance(noise, settings, t)) << ','
           << fmt("%.4f", fidelity::snr_db(noise, settings, t)) << '\n';
    }
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }
  return kExitOk;
}

int cmd_list_presets(std::ostream& out) {
  const energy::EnergyTable table = energy::EnergyTable::defaults();
  out << "workload presets:\n";
  out << "  name            resolution  fps   trad_w  nsp_w  multiplier  compute_w\n";
  for (const auto& p : energy::builtin_profiles()) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  %-15s %lldx%-6lld %-5.4g %-7.3f %-6.3f %-11.3f %.3f\n",
                  p.name.c_str(), static_cast<long long>(p.width_px),
                  static_cast<long long>(p.height_px), p.fps,
                  p.p_cap_far_system_w(table), p.p_nsp_system_w(table),
                  p.traffic_multiplier, p.compute_power_w);
    out << buf;
  }

  std::set<std::string> cfgs;
  auto scan = [&cfgs](const fs::path& dir) {
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (entry.path().extension() == ".cfg") cfgs.insert(entry.path().filename().string());
    }
  };
  if (const char* dir = std::getenv("STAGIONI_PRESET_DIR")) scan(dir);
  scan("presets");
#ifdef STAGIONI_BUNDLED_PRESETS
  scan(STAGIONI_BUNDLED_PRESETS);
#endif
  if (!cfgs.empty()) {
    out << "scenario presets:\n";
    for (const auto& c : cfgs) out << "  " << c << '\n';
  }
  return kExitOk;
}

namespace {

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

void add(std::vector<Check>& checks, const std::string& name, bool pass,
         const std::string& detail) {
  checks.push_back({name, pass, detail});
}

/// Regression checks against the characterized model numbers. Model
/// overrides flow in through the optional scenario config so perturbed
/// parameters are caught.
std::vector<Check> run_validation(const sim::Scenario& base) {
  std::vector<Check> checks;
  const thermal::ThermalStack& stack = base.stack;
  const energy::EnergyTable& table = base.table;

  {  // steady-state prediction against the measured calibration pairs
    const thermal::CalibrationFit fit =
        thermal::calibrate({{0.25, 34.8}, {0.15, 31.4}});
    const thermal::ThermalStack cal =
        stack.with_r_eff(fit.r_eff_kpw).with_alpha_jump(0.0);
    const double t1 = thermal::steady_state(cal, 0.25, fit.ambient_c).t_die_c;
    const double t2 = thermal::steady_state(cal, 0.15, fit.ambient_c).t_die_c;
    const bool pass = std::abs(t1 - 34.8) <= 0.1 && std::abs(t2 - 31.4) <= 0.1;
    add(checks, "steady-state calibration pairs", pass,
        fmt("%.2f", t1) + " / " + fmt("%.2f", t2) + " C (expect 34.8 / 31.4)");
  }

  {  // junction jump magnitude and speed
    const double jump = thermal::temperature_jump(stack, 2.5, 0.1);
    thermal::ThermalState s;
    const double ambient = 25.0;
    const auto ss = thermal::steady_state(stack, 2.5, ambient);
    s.t_die_c = ss.t_die_c;
    s.t_pkg_c = ss.t_pkg_c;
    for (int i = 0; i < 20; ++i)
      s = thermal::transient_step(stack, s, 0.1, ambient, 1e-3);
    const double drop = ss.t_die_c - s.t_die_c;
    const bool pass = std::abs(jump - 13.2) <= 0.2 && drop >= 0.98 * 13.2 &&
                      drop <= 13.2 + 0.2;
    add(checks, "junction jump 2.5 W -> 0.1 W", pass,
        fmt("%.2f", jump) + " C model, " + fmt("%.2f", drop) +
            " C simulated in 20 ms (expect 13.2 +/- 0.2)");
  }

  {  // fraction of the jump realized in four die time constants
    const double frac =
        thermal::jump_within_latency(stack, 1.0, 4.0 * stack.tau_die_s);
    const bool pass = std::abs(frac - 0.9817) <= 0.002;
    add(checks, "jump fraction at 4*tau_die", pass,
        fmt("%.4f", frac) + " (expect 0.9817)");
  }

  {  // workload presets reproduce their published power columns
    struct Target {
      const char* name;
      double trad, nsp;
    };
    const Target targets[] = {{"alexnet", 3.00, 1.86},
                              {"mobilenet_ssd", 1.92, 0.90},
                              {"googlenet", 3.13, 1.81},
                              {"resnet50", 2.67, 1.34}};
    bool pass = true;
    std::string detail;
    for (const auto& t : targets) {
      const auto& p = energy::find_profile(t.name);
      const double trad = p.p_cap_far_system_w(table);
      const double nsp = p.p_nsp_system_w(table);
      const double save_pct =
          std::round(energy::savings(trad, nsp) * 100.0);
      if (std::abs(trad - t.trad) > 0.01 || std::abs(nsp - t.nsp) > 0.01 ||
          save_pct < 22.0 || save_pct > 53.0)
        pass = false;
      if (!detail.empty()) detail += ", ";
      detail += std::string(t.name) + " " + fmt("%.2f", trad) + "/" + fmt("%.2f", nsp);
    }
    add(checks, "workload preset power columns", pass, detail);
  }

  {  // one-frame stop cool-down from 87 C at the 2.5 W operating point
    const double die0 = 87.0;
    thermal::ThermalState s;
    s.t_die_c = die0;
    s.t_pkg_c = die0 - 2.5 * stack.alpha_jump_kpw;
    const double ambient = s.t_pkg_c - 2.5 * stack.r_eff_kpw();
    for (int i = 0; i < 33; ++i)
      s = thermal::transient_step(stack, s, 0.1, ambient, 1e-3);
    const bool pass = std::abs(s.t_die_c - 74.0) <= 1.0;
    add(checks, "one-frame stop cool-down 87 C", pass,
        fmt("%.2f", s.t_die_c) + " C after 33 ms (expect 74 +/- 1)");
  }

  return checks;
}

}  // namespace

int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err) {
  sim::Scenario base;
  try {
    if (!opt.config.empty()) base = load_scenario(opt.config);
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  std::vector<Check> checks;
  try {
    checks = run_validation(base);

    // Bundled scenario smoke run; a missing preset is a config error.
    sim::Scenario scenario = load_scenario("resnet_migration.cfg");
    scenario.record_rows = false;
    const sim::Metrics m = sim::run(scenario).metrics;
    add(checks, "bundled resnet_migration scenario",
        m.duty_cycle > 0.0 && m.duty_cycle <= 1.0 && m.frames_dropped == 0,
        "duty cycle " + fmt("%.3f", m.duty_cycle));
  } catch (const config::ConfigError& e) {
    return classify_error(e, err);
  } catch (const std::exception& e) {
    return classify_error(e, err);
  }

  bool all_pass = true;
  for (const auto& c : checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    all_pass = all_pass && c.pass;
  }
  out << (all_pass ? "validation passed\n" : "validation FAILED\n");
  return all_pass ? kExitOk : kExitValidationFailure;
}

}  // namespace stagioni::cli
