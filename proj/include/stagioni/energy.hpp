#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagioni::energy {

/// Per-pixel energy of the pipeline components, pJ/pixel. The traffic
/// multiplier models DRAM/DDR accesses per input pixel caused by
/// intermediate DNN data; it is fitted per workload.
struct EnergyTable {
  double sensing_pj = 595.0;
  double csi_tx_pj = 900.0;    ///< sensor-to-SoC serial interface
  double ddr_tx_pj = 2800.0;   ///< SoC-to-DRAM interface
  double dram_read_pj = 283.0;
  double dram_write_pj = 394.0;
  double dram_traffic_multiplier = 1.0;

  static EnergyTable defaults() { return EnergyTable{}; }

  void validate() const {
    for (double v : {sensing_pj, csi_tx_pj, ddr_tx_pj, dram_read_pj, dram_write_pj}) {
      if (v < 0.0) throw std::invalid_argument("EnergyTable: entries must be non-negative");
    }
    if (dram_traffic_multiplier < 1.0)
      throw std::invalid_argument("EnergyTable: dram_traffic_multiplier must be >= 1");
  }
};

enum class Pipeline { traditional, near_sensor };

/// Component-wise system power in watts; total is the exact sum.
struct PowerBreakdown {
  double sensing_w = 0.0;
  double csi_w = 0.0;
  double ddr_interface_w = 0.0;
  double dram_w = 0.0;
  double compute_w = 0.0;

  double total_w() const {
    return sensing_w + csi_w + ddr_interface_w + dram_w + compute_w;
  }
};

/// A named vision workload: capture geometry, VPU compute power, CAP-mode
/// residual in-stack power, and the derived per-mode system totals.
struct PowerProfile {
  std::string name;
  std::int64_t width_px = 1920;
  std::int64_t height_px = 1080;
  double fps = 30.0;
  double compute_power_w = 0.0;          ///< VPU power while processing
  double traffic_multiplier = 1.0;       ///< fitted DRAM accesses per pixel
  double p_cap_near_w = 0.1;             ///< in-stack residual in CAP mode
  bool far_vpu_available = true;

  std::int64_t resolution_px() const { return width_px * height_px; }

  /// In-stack power while processing near sensor (drives the thermal model).
  double p_nsp_near_sensor_w(const EnergyTable& t) const;
  /// System power in NSP mode (everything runs in-stack; control bytes ~ 0).
  double p_nsp_system_w(const EnergyTable& t) const;
  /// System power with processing on the far VPU (traditional pipeline);
  /// also the full-far baseline and the seasonal-migration CAP power.
  double p_cap_far_system_w(const EnergyTable& t) const;
  /// System power in stop-capture-go CAP mode: only the in-stack residual
  /// stays on (frames are captured and dropped, SoC sleeps).
  double p_cap_idle_system_w() const { return p_cap_near_w; }
  /// Sensing-only in-stack power: what the sensor dissipates in the
  /// full-far baseline.
  double p_sensing_w(const EnergyTable& t) const;

  /// Returns a copy whose compute power is adjusted so the near-sensor
  /// in-stack power equals `target_w`. Throws if the target is below the
  /// data-movement floor.
  PowerProfile with_nsp_power(double target_w, const EnergyTable& t) const;

  void validate(const EnergyTable& t) const;
};

/// res * fps. Errors on non-positive resolution or rate.
double pixel_rate(const PowerProfile& profile);

/// Composes per-mode system power for a pipeline choice. The traditional
/// pipeline pays sensing + CSI + DDR-interface and DRAM traffic (interface
/// and storage scaled by the traffic multiplier) + compute; the near-sensor
/// pipeline drops the CSI pixel stream and the DDR interface.
PowerBreakdown system_power(const EnergyTable& table, const PowerProfile& profile,
                            Pipeline pipeline);

/// (traditional - near_sensor) / traditional. Negative savings are returned
/// as-is with a note appended to `warning` when provided.
double savings(double traditional_w, double near_sensor_w,
               std::string* warning = nullptr);

/// Closed-form per-workload fit: finds the traffic multiplier that
/// reproduces the traditional-minus-NSP gap at the profile's pixel rate,
/// and the compute power that reproduces the NSP total.
struct WorkloadFit {
  double traffic_multiplier;
  double compute_power_w;
};
WorkloadFit fit_workload(const EnergyTable& table, std::int64_t resolution_px,
                         double fps, double traditional_w, double nsp_w);

/// The four bundled workload presets, fitted against their published
/// traditional/NSP system power columns at 1920x1080 capture.
const std::vector<PowerProfile>& builtin_profiles();

/// Looks up a built-in profile by name; throws std::invalid_argument with
/// the list of known names on a miss.
const PowerProfile& find_profile(const std::string& name);

}  // namespace stagioni::energy
