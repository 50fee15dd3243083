#include "stagioni/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace stagioni::fidelity {

namespace {

constexpr double kKelvin = 273.15;

double clipped_signal(const NoiseModel& model, const CameraSettings& s) {
  const double gain = s.iso / 100.0;
  const double signal = model.gain_k * s.lux * s.exposure_ms * gain;
  return std::min(signal, model.full_well_clip);
}

}  // namespace

double noise_variance(const NoiseModel& model, const CameraSettings& settings,
                      double t_die_c) {
  if (t_die_c < kMinModelTempC || t_die_c > kMaxModelTempC)
    throw std::domain_error("noise_variance: temperature outside model range [-20, 150] C");
  const double gain = settings.iso / 100.0;
  const double gain2 = gain * gain;
  const double read_term =
      gain2 * model.read_var_ref * (t_die_c + kKelvin) / (model.t0_c + kKelvin);
  const double dark_term =
      gain2 * settings.exposure_ms * model.dark_current_ref *
      std::exp2((t_die_c - model.t0_c) / model.doubling_temp_c);
  return read_term + dark_term;
}

double snr_db(const NoiseModel& model, const CameraSettings& settings,
              double t_die_c) {
  const double signal = clipped_signal(model, settings);
  if (signal <= 0.0) return -std::numeric_limits<double>::infinity();
  const double sigma = std::sqrt(noise_variance(model, settings, t_die_c));
  if (sigma <= 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 20.0 * std::log10(signal / sigma));
}

double threshold_temperature(const NoiseModel& model, const CameraSettings& settings,
                             double snr_target_db) {
  constexpr double lo_bound = 0.0;
  const double hi_bound = kMaxModelTempC;

  if (snr_db(model, settings, lo_bound) < snr_target_db) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "fidelity target %.1f dB unreachable even at 0 C "
                  "(lux %.1f, exposure %.1f ms, ISO %.0f)",
                  snr_target_db, settings.lux, settings.exposure_ms, settings.iso);
    throw InfeasibleFidelityError(buf);
  }
  if (snr_db(model, settings, hi_bound) >= snr_target_db) return hi_bound;

  // snr is strictly decreasing in temperature; keep lo on the feasible side.
  double lo = lo_bound, hi = hi_bound;
  while (hi - lo > 0.01) {
    const double mid = 0.5 * (lo + hi);
    if (snr_db(model, settings, mid) >= snr_target_db)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

CameraSettings settings_for_lux(double lux) {
  if (!(lux > 0.0))
    throw std::invalid_argument("settings_for_lux: illumination must be positive");

  struct Point {
    double lux;
    double exposure_ms;
    double iso;
  };
  // Characterized auto-exposure outputs for daylight / office / dim office.
  static constexpr Point table[] = {
      {3.2, 64.0, 800.0},
      {320.0, 32.0, 400.0},
      {32000.0, 16.0, 100.0},
  };

  CameraSettings out;
  out.lux = lux;
  if (lux <= table[0].lux) {
    out.exposure_ms = table[0].exposure_ms;
    out.iso = table[0].iso;
    return out;
  }
  if (lux >= table[2].lux) {
    out.exposure_ms = table[2].exposure_ms;
    out.iso = table[2].iso;
    return out;
  }
  const Point& a = (lux < table[1].lux) ? table[0] : table[1];
  const Point& b = (lux < table[1].lux) ? table[1] : table[2];
  const double w = (std::log10(lux) - std::log10(a.lux)) /
                   (std::log10(b.lux) - std::log10(a.lux));
  out.exposure_ms = a.exposure_ms + w * (b.exposure_ms - a.exposure_ms);
  out.iso = a.iso + w * (b.iso - a.iso);
  return out;
}

}  // namespace stagioni::fidelity
