#include "stagioni/thermal.hpp"

#include <cmath>
#include <cstdio>

namespace stagioni::thermal {

namespace {

constexpr double kPowerDensityBoundWcm2 = 20.0;

std::string format_warning(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return std::string(buf);
}

}  // namespace

double ThermalStack::r_eff_kpw() const {
  const double up = r_jc_kpw + r_ca_kpw;
  const double down = r_jb_kpw + r_ba_kpw;
  return up * down / (up + down);
}

ThermalStack ThermalStack::with_r_eff(double r_eff_target_kpw) const {
  if (r_eff_target_kpw <= 0.0)
    throw std::invalid_argument("with_r_eff: target resistance must be positive");
  ThermalStack out = *this;
  const double k = r_eff_target_kpw / r_eff_kpw();
  out.r_ca_kpw *= k;
  out.r_jc_kpw *= k;
  out.r_jb_kpw *= k;
  out.r_ba_kpw *= k;
  return out;
}

ThermalStack ThermalStack::with_alpha_jump(double alpha_kpw) const {
  if (alpha_kpw < 0.0)
    throw std::invalid_argument("with_alpha_jump: coefficient must be non-negative");
  ThermalStack out = *this;
  out.alpha_jump_kpw = alpha_kpw;
  return out;
}

void ThermalStack::validate(std::vector<std::string>* warnings,
                            double p_check_w) const {
  const double positives[] = {r_ca_kpw, r_jc_kpw, r_jb_kpw, r_ba_kpw,
                              r_sd_kpw, r_dv_kpw, c_pkg_jpk, c_die_jpk,
                              tau_die_s, die_area_cm2};
  for (double v : positives) {
    if (!(v > 0.0))
      throw std::invalid_argument(
          "ThermalStack: resistances, capacitances, tau_die and die_area must be positive");
  }
  if (alpha_jump_kpw < 0.0)
    throw std::invalid_argument("ThermalStack: alpha_jump must be non-negative");
  if (!(r_eff_kpw() > 0.0) || !std::isfinite(r_eff_kpw()))
    throw std::invalid_argument("ThermalStack: effective termination resistance is not finite/positive");

  if (warnings) {
    const double r_inter = std::max(r_sd_kpw, r_dv_kpw);
    const double r_term = std::max(r_jc_kpw + r_ca_kpw, r_jb_kpw + r_ba_kpw);
    if (r_inter * 100.0 > r_term) {
      warnings->push_back(format_warning(
          "inter-layer resistance %.3g K/W is not two orders of magnitude below "
          "the termination path %.3g K/W; the single-point die reduction may be coarse",
          r_inter, r_term));
    }
    if (p_check_w > 0.0) {
      const double density = p_check_w / die_area_cm2;
      if (density > kPowerDensityBoundWcm2) {
        warnings->push_back(format_warning(
            "power density %.1f W/cm^2 exceeds the %.0f W/cm^2 spatial-uniformity bound",
            density, kPowerDensityBoundWcm2));
      }
    }
  }
}

SteadyTemps steady_state(const ThermalStack& stack, double p_near_sensor_w,
                         double t_ambient_c) {
  if (p_near_sensor_w < 0.0)
    throw std::domain_error("steady_state: power must be non-negative");
  const double t_pkg = t_ambient_c + p_near_sensor_w * stack.r_eff_kpw();
  const double t_die = t_pkg + p_near_sensor_w * stack.alpha_jump_kpw;
  return {t_die, t_pkg};
}

LayerTemps layer_temperatures(const ThermalStack& stack, double t_die_c,
                              double p_near_sensor_w) {
  const double up = stack.r_jc_kpw + stack.r_ca_kpw;
  const double down = stack.r_jb_kpw + stack.r_ba_kpw;
  const double up_fraction = down / (up + down);
  const double q_up = up_fraction * p_near_sensor_w;
  // Sensor is the coolest layer (closest to the case), VPU the hottest.
  const double dram = t_die_c + q_up * stack.r_sd_kpw;
  const double vpu = dram + q_up * stack.r_dv_kpw;
  return {t_die_c, dram, vpu};
}

ThermalState transient_step(const ThermalStack& stack, const ThermalState& state,
                            double p_near_sensor_w, double t_ambient_c,
                            double dt_s) {
  if (!(dt_s > 0.0)) throw std::domain_error("transient_step: dt must be positive");
  if (p_near_sensor_w < 0.0)
    throw std::domain_error("transient_step: power must be non-negative");

  const double tau_p = stack.tau_pkg_s();
  const double tau_d = stack.tau_die_s;
  const double pkg_target = t_ambient_c + p_near_sensor_w * stack.r_eff_kpw();
  const double die_offset = p_near_sensor_w * stack.alpha_jump_kpw;

  const double ep = std::exp(-dt_s / tau_p);
  const double ed = std::exp(-dt_s / tau_d);

  ThermalState next;
  next.time_s = state.time_s + dt_s;
  next.t_pkg_c = pkg_target + (state.t_pkg_c - pkg_target) * ep;

  // Die node driven by the exponentially-relaxing package: closed form of
  //   die' = (pkg(t) + die_offset - die) / tau_d.
  const double pkg_dev = state.t_pkg_c - pkg_target;
  double coupling;
  if (std::abs(tau_p - tau_d) > 1e-9 * tau_p) {
    coupling = pkg_dev * tau_p / (tau_p - tau_d) * (ep - ed);
  } else {
    coupling = pkg_dev * (dt_s / tau_d) * ed;  // degenerate equal-tau limit
  }
  next.t_die_c = (pkg_target + die_offset) +
                 (state.t_die_c - pkg_target - die_offset) * ed + coupling;
  return next;
}

double temperature_jump(const ThermalStack& stack, double p_nsp_w, double p_cap_w) {
  if (p_cap_w < 0.0 || p_nsp_w < p_cap_w)
    throw std::domain_error("temperature_jump: requires p_nsp >= p_cap >= 0");
  return stack.alpha_jump_kpw * (p_nsp_w - p_cap_w);
}

double jump_within_latency(const ThermalStack& stack, double full_jump_c,
                           double t_latency_s) {
  if (t_latency_s < 0.0)
    throw std::domain_error("jump_within_latency: latency must be non-negative");
  return full_jump_c * (1.0 - std::exp(-t_latency_s / stack.tau_die_s));
}

CalibrationFit calibrate(const std::vector<std::pair<double, double>>& pairs,
                         std::optional<double> known_ambient_c) {
  if (pairs.size() < 2)
    throw std::invalid_argument("calibrate: need at least two (power, temperature) pairs");

  const double n = static_cast<double>(pairs.size());
  double sp = 0.0, st = 0.0, spp = 0.0, spt = 0.0;
  for (const auto& [p, t] : pairs) {
    sp += p;
    st += t;
    spp += p * p;
    spt += p * t;
  }

  CalibrationFit fit{};
  if (known_ambient_c) {
    if (spp == 0.0)
      throw std::invalid_argument("calibrate: all powers are zero (singular fit)");
    fit.ambient_c = *known_ambient_c;
    fit.r_eff_kpw = (spt - fit.ambient_c * sp) / spp;
  } else {
    const double det = n * spp - sp * sp;
    if (std::abs(det) < 1e-12 * std::max(1.0, n * spp))
      throw std::invalid_argument("calibrate: powers are all equal (singular fit)");
    fit.r_eff_kpw = (n * spt - sp * st) / det;
    fit.ambient_c = (st - fit.r_eff_kpw * sp) / n;
  }

  double sse = 0.0;
  for (const auto& [p, t] : pairs) {
    const double e = t - fit.predict(p);
    sse += e * e;
  }
  fit.residual_rms_c = std::sqrt(sse / n);
  return fit;
}

}  // namespace stagioni::thermal
