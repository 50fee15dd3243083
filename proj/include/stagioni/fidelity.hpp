#pragma once

#include <stdexcept>
#include <string>

namespace stagioni::fidelity {

/// Capture settings as chosen by an auto-exposure controller for the scene
/// illumination. ISO acts as the analog gain proxy (gain = iso/100).
struct CameraSettings {
  double exposure_ms = 16.0;
  double iso = 100.0;
  double lux = 32000.0;

  void validate() const {
    if (!(exposure_ms > 0.0)) throw std::invalid_argument("CameraSettings: exposure must be positive");
    if (iso < 100.0) throw std::invalid_argument("CameraSettings: iso must be >= 100");
    if (!(lux > 0.0)) throw std::invalid_argument("CameraSettings: illumination must be positive");
  }
};

/// Two-term temporal noise model in pixel-intensity units: read noise with
/// variance proportional to absolute temperature, plus dark-current shot
/// noise that doubles every `doubling_temp_c` degrees and scales with
/// exposure. Both terms are amplified by the analog gain squared.
/// Fixed-pattern noise is excluded (subtracted at calibration time in real
/// pipelines).
struct NoiseModel {
  double read_var_ref = 64.0;       ///< variance at t0, gain 1
  double dark_current_ref = 0.0245; ///< variance per ms of exposure at t0, gain 1
  double doubling_temp_c = 6.0;     ///< dark current doubles every this many degC
  double gain_k = 1.0;              ///< signal per (lux * ms) at gain 1
  double full_well_clip = 4095.0;   ///< max representable signal (12-bit)
  double t0_c = 25.0;               ///< reference temperature

  static NoiseModel defaults() { return NoiseModel{}; }

  void validate() const {
    for (double v : {read_var_ref, dark_current_ref, doubling_temp_c, gain_k,
                     full_well_clip}) {
      if (!(v > 0.0))
        throw std::invalid_argument("NoiseModel: parameters must be positive");
    }
  }
};

/// Raised when a requested SNR cannot be met at any die temperature >= 0 C
/// under the given settings. Policies must surface this, not degrade.
class InfeasibleFidelityError : public std::runtime_error {
 public:
  explicit InfeasibleFidelityError(const std::string& what)
      : std::runtime_error(what) {}
};

/// SNR ceiling representing 12-bit quantization.
inline constexpr double kSnrCapDb = 96.0;

/// Valid die-temperature range for the noise model.
inline constexpr double kMinModelTempC = -20.0;
inline constexpr double kMaxModelTempC = 150.0;

/// Total noise variance in pixel-intensity units at the given die
/// temperature. Errors outside the model's temperature range.
double noise_variance(const NoiseModel& model, const CameraSettings& settings,
                      double t_die_c);

/// 20*log10(clipped_signal / sigma); +inf is capped at 96 dB, zero signal
/// yields -inf.
double snr_db(const NoiseModel& model, const CameraSettings& settings,
              double t_die_c);

/// Maximum die temperature at which snr_db(...) still meets `snr_target_db`,
/// found by monotone bisection to 0.01 C over [0, 150] C. The returned value
/// is on the feasible side of the bracket. Throws InfeasibleFidelityError
/// when the target is missed even at 0 C.
double threshold_temperature(const NoiseModel& model, const CameraSettings& settings,
                             double snr_target_db);

/// Auto-exposure lookup: maps scene illumination to (exposure, iso) using
/// the three characterized lighting presets with log-linear interpolation in
/// lux; clamps outside [3.2, 32000] lux.
CameraSettings settings_for_lux(double lux);

}  // namespace stagioni::fidelity
