#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stagioni::thermal {

/// Lumped RC description of a stacked image sensor: four termination
/// resistances (junction-to-case/board, case/board-to-ambient), two
/// inter-layer resistances inside the stack, a package capacitance and a
/// combined die-stack capacitance. The die-to-package coupling is carried
/// by two reduced parameters: alpha_jump (K per W of near-sensor power)
/// and tau_die (junction time constant).
struct ThermalStack {
  double r_ca_kpw = 56.0;   ///< case to ambient, K/W
  double r_jc_kpw = 6.0;    ///< junction to case, K/W
  double r_jb_kpw = 40.0;   ///< junction to board, K/W
  double r_ba_kpw = 14.0;   ///< board to ambient, K/W
  double r_sd_kpw = 0.6;    ///< sensor layer to DRAM layer, K/W
  double r_dv_kpw = 0.6;    ///< DRAM layer to VPU layer, K/W
  double c_pkg_jpk = 1.0;     ///< package heat capacitance, J/K
  double c_die_jpk = 1.95e-3; ///< sensor+DRAM+VPU combined, J/K
  double alpha_jump_kpw = 5.5; ///< die-over-package rise per W of in-stack power
  double tau_die_s = 5e-3;     ///< junction (die) time constant
  double die_area_cm2 = 0.15625; ///< stack footprint, used for the power-density check

  static ThermalStack defaults() { return ThermalStack{}; }

  /// Parallel combination of the case and board termination paths.
  double r_eff_kpw() const;

  /// Package time constant c_pkg * r_eff, the coarse settling scale.
  double tau_pkg_s() const { return c_pkg_jpk * r_eff_kpw(); }

  /// Returns a copy whose four termination resistances are scaled so that
  /// r_eff_kpw() equals the requested value. Path ratios are preserved.
  ThermalStack with_r_eff(double r_eff_target_kpw) const;

  /// Returns a copy with the die-over-package coefficient replaced.
  ThermalStack with_alpha_jump(double alpha_kpw) const;

  /// Throws std::invalid_argument on non-positive R/C values. Soft issues
  /// (inter-layer resistances not clearly smaller than the termination
  /// paths, power density above the spatial-uniformity bound at the given
  /// power) are appended to `warnings` instead of failing.
  void validate(std::vector<std::string>* warnings = nullptr,
                double p_check_w = 0.0) const;
};

/// Instantaneous two-node state advanced functionally by transient_step.
struct ThermalState {
  double t_die_c = 0.0;
  double t_pkg_c = 0.0;
  double time_s = 0.0;
};

struct SteadyTemps {
  double t_die_c;
  double t_pkg_c;
};

/// Per-layer steady temperatures when the collapsed die point is split back
/// into sensor / DRAM / VPU using the inter-layer resistances. The sensor
/// sits closest to the case; heat flows up from the VPU.
struct LayerTemps {
  double sensor_c;
  double dram_c;
  double vpu_c;
};

/// Steady-state temperatures under constant near-sensor power.
/// t_pkg = ambient + p * r_eff, t_die = t_pkg + p * alpha_jump.
SteadyTemps steady_state(const ThermalStack& stack, double p_near_sensor_w,
                         double t_ambient_c);

/// Splits a collapsed die temperature into per-layer values (gradients come
/// from the fraction of heat that flows up through the stack).
LayerTemps layer_temperatures(const ThermalStack& stack, double t_die_c,
                              double p_near_sensor_w);

/// Advances the two-node network by dt under piecewise-constant power using
/// the closed-form solution of the coupled linear ODE (package charges
/// toward ambient + p*r_eff with tau_pkg; die relaxes toward pkg + p*alpha
/// with tau_die). Unconditionally stable for any dt.
ThermalState transient_step(const ThermalStack& stack, const ThermalState& state,
                            double p_near_sensor_w, double t_ambient_c,
                            double dt_s);

/// Immediate die-temperature drop when in-stack power falls from p_nsp to
/// p_cap: alpha_jump * (p_nsp - p_cap).
double temperature_jump(const ThermalStack& stack, double p_nsp_w, double p_cap_w);

/// Fraction of a full jump realized within a latency budget:
/// full_jump * (1 - exp(-t_latency / tau_die)).
double jump_within_latency(const ThermalStack& stack, double full_jump_c,
                           double t_latency_s);

/// Least-squares fit of steady die temperature against power,
/// T = ambient + p * r_eff. The fitted resistance is the total
/// die-to-ambient coefficient: when building a stack from a fit, the
/// junction offset is already folded in (use with_r_eff + with_alpha_jump(0)
/// for steady-state prediction).
struct CalibrationFit {
  double r_eff_kpw;
  double ambient_c;
  double residual_rms_c;

  double predict(double p_w) const { return ambient_c + p_w * r_eff_kpw; }
};

/// Fits (r_eff, ambient) from (power, steady die temperature) pairs; exact
/// for two pairs. When `known_ambient_c` is provided only r_eff is fitted.
/// Throws std::invalid_argument with fewer than two pairs or when all
/// powers are equal (singular fit).
CalibrationFit calibrate(const std::vector<std::pair<double, double>>& pairs,
                         std::optional<double> known_ambient_c = std::nullopt);

}  // namespace stagioni::thermal
