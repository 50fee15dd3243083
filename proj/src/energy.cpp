#include "stagioni/energy.hpp"

#include <cmath>

namespace stagioni::energy {

namespace {
constexpr double kPjToJ = 1e-12;

double raw_pixel_rate(const PowerProfile& p) {
  return static_cast<double>(p.resolution_px()) * p.fps;
}
}  // namespace

double pixel_rate(const PowerProfile& profile) {
  if (profile.resolution_px() <= 0)
    throw std::invalid_argument("pixel_rate: resolution must be positive");
  if (!(profile.fps > 0.0))
    throw std::invalid_argument("pixel_rate: frame rate must be positive");
  return raw_pixel_rate(profile);
}

PowerBreakdown system_power(const EnergyTable& table, const PowerProfile& profile,
                            Pipeline pipeline) {
  const double rate = raw_pixel_rate(profile);  // fps == 0 composes to 0 W
  const double m = profile.traffic_multiplier;

  PowerBreakdown b;
  b.sensing_w = rate * table.sensing_pj * kPjToJ;
  b.dram_w = rate * (table.dram_read_pj + table.dram_write_pj) * m * kPjToJ;
  b.compute_w = profile.compute_power_w;
  if (pipeline == Pipeline::traditional) {
    b.csi_w = rate * table.csi_tx_pj * kPjToJ;
    b.ddr_interface_w = rate * table.ddr_tx_pj * m * kPjToJ;
  }
  return b;
}

double PowerProfile::p_nsp_near_sensor_w(const EnergyTable& t) const {
  return system_power(t, *this, Pipeline::near_sensor).total_w();
}

double PowerProfile::p_nsp_system_w(const EnergyTable& t) const {
  return system_power(t, *this, Pipeline::near_sensor).total_w();
}

double PowerProfile::p_cap_far_system_w(const EnergyTable& t) const {
  return system_power(t, *this, Pipeline::traditional).total_w();
}

double PowerProfile::p_sensing_w(const EnergyTable& t) const {
  return raw_pixel_rate(*this) * t.sensing_pj * kPjToJ;
}

PowerProfile PowerProfile::with_nsp_power(double target_w, const EnergyTable& t) const {
  PowerProfile out = *this;
  out.compute_power_w = 0.0;
  const double floor_w = out.p_nsp_system_w(t);
  if (target_w < floor_w)
    throw std::invalid_argument(
        "with_nsp_power: target below the data-movement floor of " +
        std::to_string(floor_w) + " W");
  out.compute_power_w = target_w - floor_w;
  return out;
}

void PowerProfile::validate(const EnergyTable& t) const {
  if (resolution_px() <= 0 || !(fps > 0.0))
    throw std::invalid_argument("PowerProfile: resolution and fps must be positive");
  if (compute_power_w < 0.0 || p_cap_near_w < 0.0)
    throw std::invalid_argument("PowerProfile: powers must be non-negative");
  if (traffic_multiplier < 1.0)
    throw std::invalid_argument("PowerProfile: traffic multiplier must be >= 1");
  if (p_nsp_system_w(t) < p_cap_near_w)
    throw std::invalid_argument("PowerProfile: NSP system power below CAP residual");
}

double savings(double traditional_w, double near_sensor_w, std::string* warning) {
  if (!(traditional_w > 0.0))
    throw std::domain_error("savings: traditional power must be positive");
  const double s = (traditional_w - near_sensor_w) / traditional_w;
  if (s < 0.0 && warning) {
    *warning = "near-sensor power exceeds traditional power; savings are negative";
  }
  return s;
}

WorkloadFit fit_workload(const EnergyTable& table, std::int64_t resolution_px,
                         double fps, double traditional_w, double nsp_w) {
  if (resolution_px <= 0 || !(fps > 0.0))
    throw std::invalid_argument("fit_workload: resolution and fps must be positive");
  if (!(traditional_w > nsp_w))
    throw std::invalid_argument("fit_workload: traditional power must exceed NSP power");

  const double rate = static_cast<double>(resolution_px) * fps;
  const double gap_w = traditional_w - nsp_w;
  const double csi_w = rate * table.csi_tx_pj * kPjToJ;
  const double ddr_unit_w = rate * table.ddr_tx_pj * kPjToJ;

  WorkloadFit fit{};
  fit.traffic_multiplier = (gap_w - csi_w) / ddr_unit_w;
  if (fit.traffic_multiplier < 1.0)
    throw std::invalid_argument(
        "fit_workload: published gap implies a traffic multiplier below 1");

  const double in_stack_movement_w =
      rate * (table.sensing_pj +
              (table.dram_read_pj + table.dram_write_pj) * fit.traffic_multiplier) *
      kPjToJ;
  fit.compute_power_w = nsp_w - in_stack_movement_w;
  if (fit.compute_power_w < 0.0)
    throw std::invalid_argument(
        "fit_workload: published NSP power below the fitted data-movement power");
  return fit;
}

namespace {

PowerProfile make_preset(const std::string& name, double fps, double traditional_w,
                         double nsp_w) {
  const EnergyTable table = EnergyTable::defaults();
  PowerProfile p;
  p.name = name;
  p.width_px = 1920;
  p.height_px = 1080;
  p.fps = fps;
  const WorkloadFit fit =
      fit_workload(table, p.resolution_px(), fps, traditional_w, nsp_w);
  p.traffic_multiplier = fit.traffic_multiplier;
  p.compute_power_w = fit.compute_power_w;
  return p;
}

}  // namespace

const std::vector<PowerProfile>& builtin_profiles() {
  static const std::vector<PowerProfile> presets = {
      make_preset("alexnet", 12.0, 3.00, 1.86),
      make_preset("mobilenet_ssd", 11.8, 1.92, 0.90),
      make_preset("googlenet", 83.0, 3.13, 1.81),
      make_preset("resnet50", 34.0, 2.67, 1.34),
  };
  return presets;
}

const PowerProfile& find_profile(const std::string& name) {
  for (const auto& p : builtin_profiles()) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : builtin_profiles()) {
    if (!known.empty()) known += ", ";
    known += p.name;
  }
  throw std::invalid_argument("unknown workload '" + name + "' (known: " + known + ")");
}

}  // namespace stagioni::energy
