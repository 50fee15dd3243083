#include "stagioni/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace stagioni::config {

namespace {

namespace fs = std::filesystem;

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

enum class Unit {
  seconds,
  watts,
  celsius,
  kelvin_per_watt,
  joule_per_kelvin,
  picojoule,
  decibel,
  lux,
  cm2,
  unitless,
};

const char* unit_name(Unit u) {
  switch (u) {
    case Unit::seconds: return "time (s/ms/us)";
    case Unit::watts: return "power (W/mW)";
    case Unit::celsius: return "temperature (C)";
    case Unit::kelvin_per_watt: return "thermal resistance (K/W)";
    case Unit::joule_per_kelvin: return "heat capacitance (J/K or mJ/K)";
    case Unit::picojoule: return "energy per pixel (pJ)";
    case Unit::decibel: return "SNR (dB)";
    case Unit::lux: return "illumination (lux)";
    case Unit::cm2: return "area (cm2)";
    case Unit::unitless: return "plain number";
  }
  return "?";
}

struct Location {
  const std::string& source;
  int line;

  std::string str() const { return source + ":" + std::to_string(line); }
};

[[noreturn]] void fail(const Location& loc, const std::string& what) {
  throw ConfigError(loc.str() + ": " + what);
}

/// Parses "<number> [unit]" validating the unit against the expected
/// dimension; a missing unit means the base unit of that dimension.
double quantity(const std::string& raw, Unit unit, const Location& loc) {
  const std::string text = trim(raw);
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) fail(loc, "expected a number, got '" + text + "'");
  const std::string suffix = trim(std::string(end));
  if (suffix.empty()) return value;

  struct Scale {
    const char* name;
    double factor;
  };
  auto match = [&](std::initializer_list<Scale> scales) -> double {
    for (const auto& s : scales) {
      if (suffix == s.name) return value * s.factor;
    }
    fail(loc, "unit '" + suffix + "' does not measure " + unit_name(unit));
  };

  switch (unit) {
    case Unit::seconds: return match({{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"min", 60.0}});
    case Unit::watts: return match({{"W", 1.0}, {"mW", 1e-3}, {"uW", 1e-6}});
    case Unit::celsius: return match({{"C", 1.0}});
    case Unit::kelvin_per_watt: return match({{"K/W", 1.0}});
    case Unit::joule_per_kelvin: return match({{"J/K", 1.0}, {"mJ/K", 1e-3}});
    case Unit::picojoule: return match({{"pJ", 1.0}});
    case Unit::decibel: return match({{"dB", 1.0}});
    case Unit::lux: return match({{"lux", 1.0}});
    case Unit::cm2: return match({{"cm2", 1.0}});
    case Unit::unitless:
      fail(loc, "'" + suffix + "' not allowed: key takes a plain number");
  }
  fail(loc, "unhandled unit class");
}

long integer(const std::string& raw, const Location& loc) {
  const double v = quantity(raw, Unit::unitless, loc);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) fail(loc, "expected an integer");
  return n;
}

/// Environment traces: either a single quantity ("25 C") or a list of
/// "time: value" pairs with one trailing unit ("0: 20, 100: 40 C").
std::vector<sim::TracePoint> trace(const std::string& raw, Unit unit,
                                   const Location& loc) {
  if (raw.find(':') == std::string::npos) {
    return {{0.0, quantity(raw, unit, loc)}};
  }
  std::vector<sim::TracePoint> out;
  for (const std::string& item : split(raw, ',')) {
    const auto pos = item.find(':');
    if (pos == std::string::npos)
      fail(loc, "trace entries must be 'time: value' pairs");
    sim::TracePoint p;
    p.time_s = quantity(item.substr(0, pos), Unit::seconds, loc);
    p.value = quantity(item.substr(pos + 1), unit, loc);
    out.push_back(p);
  }
  if (out.empty() || out.front().time_s != 0.0)
    fail(loc, "traces must start at time 0");
  return out;
}

struct Parser {
  sim::Scenario sc;
  bool custom_workload = false;
  energy::PowerProfile custom;

  void apply(const std::string& section, const std::string& key,
             const std::string& value, const Location& loc) {
    if (section == "scenario") return scenario_key(key, value, loc);
    if (section == "fidelity") return fidelity_key(key, value, loc);
    if (section == "environment") return environment_key(key, value, loc);
    if (section == "triggers") return triggers_key(key, value, loc);
    if (section == "policy") return policy_key(key, value, loc);
    if (section == "workload") return workload_key(key, value, loc);
    if (section == "thermal") return thermal_key(key, value, loc);
    if (section == "energy") return energy_key(key, value, loc);
    if (section == "noise") return noise_key(key, value, loc);
    fail(loc, "unknown section [" + section + "]");
  }

  void scenario_key(const std::string& key, const std::string& value,
                    const Location& loc) {
    if (key == "duration") sc.duration_s = quantity(value, Unit::seconds, loc);
    else if (key == "frame_period") sc.frame_period_s = quantity(value, Unit::seconds, loc);
    else if (key == "workload") sc.workload = value;
    else if (key == "policy") {
      const auto p = policy::parse_policy(value);
      if (!p) fail(loc, "unknown policy '" + value + "' (full_far, stop_capture_go, seasonal_migration)");
      sc.policy = *p;
    } else if (key == "seed") sc.rng_seed = static_cast<std::uint64_t>(integer(value, loc));
    else if (key == "initial_t_die") sc.initial_t_die_c = quantity(value, Unit::celsius, loc);
    else if (key == "initial_t_pkg") sc.initial_t_pkg_c = quantity(value, Unit::celsius, loc);
    else fail(loc, "unknown key '" + key + "' in [scenario]");
  }

  void fidelity_key(const std::string& key, const std::string& value,
                    const Location& loc) {
    if (key == "vision_snr") sc.fidelity.vision_snr_db = quantity(value, Unit::decibel, loc);
    else if (key == "imaging_snr") {
      if (value == "none") sc.fidelity.imaging_snr_db = std::nullopt;
      else sc.fidelity.imaging_snr_db = quantity(value, Unit::decibel, loc);
    } else if (key == "capture_latency") sc.fidelity.capture_latency_s = quantity(value, Unit::seconds, loc);
    else fail(loc, "unknown key '" + key + "' in [fidelity]");
  }

  void environment_key(const std::string& key, const std::string& value,
                       const Location& loc) {
    if (key == "ambient") sc.ambient_trace = trace(value, Unit::celsius, loc);
    else if (key == "lighting") sc.lighting_trace = trace(value, Unit::lux, loc);
    else fail(loc, "unknown key '" + key + "' in [environment]");
  }

  void triggers_key(const std::string& key, const std::string& value,
                    const Location& loc) {
    if (key == "at") {
      sc.trigger_times_s.clear();
      for (const std::string& item : split(value, ','))
        sc.trigger_times_s.push_back(quantity(item, Unit::seconds, loc));
    } else if (key == "random_count") {
      sc.random_trigger_count = static_cast<int>(integer(value, loc));
    } else fail(loc, "unknown key '" + key + "' in [triggers]");
  }

  void policy_key(const std::string& key, const std::string& value,
                  const Location& loc) {
    if (key == "gap") {
      if (value == "optimize") sc.gap = policy::GapStrategy::optimize();
      else sc.gap = policy::GapStrategy::fixed(quantity(value, Unit::celsius, loc));
    } else if (key == "stop_frames") sc.stop_frames = static_cast<int>(integer(value, loc));
    else if (key == "p_cap_near") sc.p_cap_near_w = quantity(value, Unit::watts, loc);
    else if (key == "t_high") explicit_bound(loc).first = quantity(value, Unit::celsius, loc);
    else if (key == "t_low") explicit_bound(loc).second = quantity(value, Unit::celsius, loc);
    else if (key == "switch_overlap") sc.switch_overlap_s = quantity(value, Unit::seconds, loc);
    else fail(loc, "unknown key '" + key + "' in [policy]");
  }

  std::pair<double, double>& explicit_bound(const Location& loc) {
    if (!sc.explicit_bounds_c) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      sc.explicit_bounds_c = std::make_pair(nan, nan);
      bounds_loc = loc.str();
    }
    return *sc.explicit_bounds_c;
  }
  std::string bounds_loc;

  void workload_key(const std::string& key, const std::string& value,
                    const Location& loc) {
    if (key == "nsp_power") {
      sc.nsp_power_w = quantity(value, Unit::watts, loc);
      return;
    }
    custom_workload = true;
    if (key == "name") custom.name = value;
    else if (key == "resolution") {
      const auto x = value.find('x');
      if (x == std::string::npos) fail(loc, "resolution must look like 1920x1080");
      custom.width_px = integer(value.substr(0, x), loc);
      custom.height_px = integer(value.substr(x + 1), loc);
    } else if (key == "fps") custom.fps = quantity(value, Unit::unitless, loc);
    else if (key == "compute_power") custom.compute_power_w = quantity(value, Unit::watts, loc);
    else if (key == "traffic_multiplier") custom.traffic_multiplier = quantity(value, Unit::unitless, loc);
    else if (key == "p_cap_near") custom.p_cap_near_w = quantity(value, Unit::watts, loc);
    else if (key == "far_vpu") custom.far_vpu_available = (value == "true" || value == "1");
    else fail(loc, "unknown key '" + key + "' in [workload]");
  }

  void thermal_key(const std::string& key, const std::string& value,
                   const Location& loc) {
    auto& t = sc.stack;
    if (key == "r_ca") t.r_ca_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "r_jc") t.r_jc_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "r_jb") t.r_jb_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "r_ba") t.r_ba_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "r_sd") t.r_sd_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "r_dv") t.r_dv_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "c_pkg") t.c_pkg_jpk = quantity(value, Unit::joule_per_kelvin, loc);
    else if (key == "c_die") t.c_die_jpk = quantity(value, Unit::joule_per_kelvin, loc);
    else if (key == "alpha_jump") t.alpha_jump_kpw = quantity(value, Unit::kelvin_per_watt, loc);
    else if (key == "tau_die") t.tau_die_s = quantity(value, Unit::seconds, loc);
    else if (key == "die_area") t.die_area_cm2 = quantity(value, Unit::cm2, loc);
    else fail(loc, "unknown key '" + key + "' in [thermal]");
  }

  void energy_key(const std::string& key, const std::string& value,
                  const Location& loc) {
    auto& e = sc.table;
    if (key == "sensing") e.sensing_pj = quantity(value, Unit::picojoule, loc);
    else if (key == "csi_tx") e.csi_tx_pj = quantity(value, Unit::picojoule, loc);
    else if (key == "ddr_tx") e.ddr_tx_pj = quantity(value, Unit::picojoule, loc);
    else if (key == "dram_read") e.dram_read_pj = quantity(value, Unit::picojoule, loc);
    else if (key == "dram_write") e.dram_write_pj = quantity(value, Unit::picojoule, loc);
    else if (key == "traffic_multiplier") e.dram_traffic_multiplier = quantity(value, Unit::unitless, loc);
    else fail(loc, "unknown key '" + key + "' in [energy]");
  }

  void noise_key(const std::string& key, const std::string& value,
                 const Location& loc) {
    auto& n = sc.noise;
    if (key == "read_var_ref") n.read_var_ref = quantity(value, Unit::unitless, loc);
    else if (key == "dark_current_ref") n.dark_current_ref = quantity(value, Unit::unitless, loc);
    else if (key == "doubling_temp") n.doubling_temp_c = quantity(value, Unit::celsius, loc);
    else if (key == "gain_k") n.gain_k = quantity(value, Unit::unitless, loc);
    else if (key == "full_well_clip") n.full_well_clip = quantity(value, Unit::unitless, loc);
    else if (key == "t0") n.t0_c = quantity(value, Unit::celsius, loc);
    else fail(loc, "unknown key '" + key + "' in [noise]");
  }

  sim::Scenario finish(const std::string& source) {
    if (custom_workload) {
      if (custom.name.empty()) custom.name = "custom";
      if (custom.traffic_multiplier < sc.table.dram_traffic_multiplier)
        custom.traffic_multiplier = sc.table.dram_traffic_multiplier;
      sc.custom_profile = custom;
    }
    if (sc.explicit_bounds_c &&
        (std::isnan(sc.explicit_bounds_c->first) ||
         std::isnan(sc.explicit_bounds_c->second) ||
         !(sc.explicit_bounds_c->second < sc.explicit_bounds_c->first))) {
      throw ConfigError(bounds_loc +
                        ": explicit bounds need both t_high and t_low with t_low < t_high");
    }
    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source + ": " + e.what());
    } catch (const policy::ConfigurationError& e) {
      throw ConfigError(source + ": " + e.what());
    }
    return sc;
  }
};

}  // namespace

sim::Scenario parse_string(const std::string& text, const std::string& source_name) {
  Parser parser;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const Location loc{source_name, line_no};
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(loc, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(loc, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(loc, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) fail(loc, "key '" + key + "' appears before any [section]");
    if (key.empty() || value.empty()) fail(loc, "empty key or value");
    parser.apply(section, key, value, loc);
  }
  return parser.finish(source_name);
}

sim::Scenario load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

std::string resolve_config_path(const std::string& name_or_path) {
  if (fs::exists(name_or_path)) return name_or_path;
  if (name_or_path.find('/') == std::string::npos) {
    // STAGIONI_PRESET_DIR replaces the preset search path entirely.
    if (const char* dir = std::getenv("STAGIONI_PRESET_DIR")) {
      const fs::path candidate = fs::path(dir) / name_or_path;
      if (fs::exists(candidate)) return candidate.string();
      throw ConfigError("preset '" + name_or_path + "' not found in " +
                        std::string(dir));
    }
    const fs::path local = fs::path("presets") / name_or_path;
    if (fs::exists(local)) return local.string();
#ifdef STAGIONI_BUNDLED_PRESETS
    const fs::path bundled = fs::path(STAGIONI_BUNDLED_PRESETS) / name_or_path;
    if (fs::exists(bundled)) return bundled.string();
#endif
  }
  throw ConfigError("config file not found: " + name_or_path);
}

}  // namespace stagioni::config
