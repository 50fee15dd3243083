#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stagioni/fidelity.hpp"

using namespace stagioni::fidelity;

namespace {
const NoiseModel kModel = NoiseModel::defaults();

CameraSettings daylight_s() { return settings_for_lux(32000.0); }
CameraSettings office_s() { return settings_for_lux(320.0); }
CameraSettings dim_s() { return settings_for_lux(3.2); }
}  // namespace

TEST_CASE("lighting table endpoints") {
  CHECK(daylight_s().exposure_ms == 16.0);
  CHECK(daylight_s().iso == 100.0);
  CHECK(office_s().exposure_ms == 32.0);
  CHECK(office_s().iso == 400.0);
  CHECK(dim_s().exposure_ms == 64.0);
  CHECK(dim_s().iso == 800.0);
  // log-linear interpolation: geometric mean of two adjacent lux points
  const CameraSettings mid = settings_for_lux(std::sqrt(320.0 * 32000.0));
  CHECK(mid.exposure_ms == doctest::Approx(24.0));
  CHECK(mid.iso == doctest::Approx(250.0));
  // clamped outside the table
  CHECK(settings_for_lux(1.0).iso == 800.0);
  CHECK(settings_for_lux(1e6).iso == 100.0);
}

TEST_CASE("variance at the reference point") {
  CameraSettings s;
  s.exposure_ms = 10.0;
  s.iso = 100.0;
  s.lux = 1000.0;
  const double v = noise_variance(kModel, s, kModel.t0_c);
  CHECK(v == doctest::Approx(kModel.read_var_ref +
                             10.0 * kModel.dark_current_ref));
}

TEST_CASE("dark term doubles every doubling_temp") {
  CameraSettings s;
  s.exposure_ms = 50.0;
  s.iso = 100.0;
  s.lux = 1000.0;
  const double read0 = kModel.read_var_ref;  // gain 1 at t0
  const double dark0 = noise_variance(kModel, s, kModel.t0_c) - read0;
  const double t1 = kModel.t0_c + kModel.doubling_temp_c;
  const double read1 = kModel.read_var_ref * (t1 + 273.15) / (kModel.t0_c + 273.15);
  const double dark1 = noise_variance(kModel, s, t1) - read1;
  CHECK(dark1 == doctest::Approx(2.0 * dark0).epsilon(1e-9));
}

TEST_CASE("variance decomposition has no cross terms") {
  // Total = read-only model + dark-only model, evaluated separately.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> temp(-10.0, 140.0);
  std::uniform_real_distribution<double> iso(100.0, 1600.0);
  for (int i = 0; i < 100; ++i) {
    CameraSettings s;
    s.exposure_ms = 32.0;
    s.iso = iso(rng);
    s.lux = 320.0;
    const double t = temp(rng);
    NoiseModel read_only = kModel;
    read_only.dark_current_ref = 1e-300;
    NoiseModel dark_only = kModel;
    dark_only.read_var_ref = 1e-300;
    CHECK(noise_variance(kModel, s, t) ==
          doctest::Approx(noise_variance(read_only, s, t) +
                          noise_variance(dark_only, s, t)).epsilon(1e-9));
  }
}

TEST_CASE("variance temperature range is enforced") {
  CHECK_THROWS_AS(noise_variance(kModel, dim_s(), -30.0), std::domain_error);
  CHECK_THROWS_AS(noise_variance(kModel, dim_s(), 151.0), std::domain_error);
}

TEST_CASE("snr definition and sentinels") {
  CameraSettings s;
  s.exposure_ms = 16.0;
  s.iso = 100.0;
  s.lux = 1.0;  // signal = 16 at gain_k 1

  // signal = 10 sigma -> 20 dB: build a model with unit sigma at t0.
  NoiseModel m = kModel;
  m.read_var_ref = 1.0;
  m.dark_current_ref = 1e-300;
  s.lux = 10.0 / 16.0;  // signal exactly 10
  CHECK(snr_db(m, s, m.t0_c) == doctest::Approx(20.0).epsilon(1e-9));

  // sigma -> 0 capped at the 12-bit ceiling
  NoiseModel quiet = kModel;
  quiet.read_var_ref = 1e-300;
  quiet.dark_current_ref = 1e-300;
  CHECK(snr_db(quiet, daylight_s(), 25.0) == kSnrCapDb);
}

TEST_CASE("snr strictly decreasing in temperature") {
  for (const CameraSettings& s : {daylight_s(), office_s(), dim_s()}) {
    double prev = snr_db(kModel, s, 0.0);
    for (double t = 5.0; t <= 150.0; t += 5.0) {
      const double cur = snr_db(kModel, s, t);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("hotter is strictly noisier at daylight settings") {
  CHECK(snr_db(kModel, daylight_s(), 92.0) < snr_db(kModel, daylight_s(), 44.0));
}

TEST_CASE("snr strictly decreasing in iso at fixed clipped signal") {
  // At full-well-clipped signal the numerator is pinned while gain amplifies
  // the noise, so raising ISO must lower SNR.
  CameraSettings s = daylight_s();
  s.lux = 1e7;  // deep in clipping
  double prev = snr_db(kModel, s, 50.0);
  for (double iso : {200.0, 400.0, 800.0, 1600.0}) {
    s.iso = iso;
    const double cur = snr_db(kModel, s, 50.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("dim-lighting knee sits near 52 C at the 26 dB bar") {
  const double knee = threshold_temperature(kModel, dim_s(), 26.0);
  CHECK(knee == doctest::Approx(52.0).epsilon(0.01));
  CHECK(snr_db(kModel, dim_s(), knee) >= 26.0);
}

TEST_CASE("threshold inversion round-trips within 0.05 dB") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> target(15.0, 40.0);
  std::uniform_real_distribution<double> lux(3.2, 32000.0);
  int tested = 0;
  for (int i = 0; i < 200; ++i) {
    const CameraSettings s = settings_for_lux(lux(rng));
    const double q = target(rng);
    double t;
    try {
      t = threshold_temperature(kModel, s, q);
    } catch (const InfeasibleFidelityError&) {
      continue;  // infeasible draws are exercised elsewhere
    }
    if (t >= stagioni::fidelity::kMaxModelTempC) continue;  // clamped, not an inversion
    CHECK(snr_db(kModel, s, t) == doctest::Approx(q).epsilon(0.0025));
    CHECK(std::abs(snr_db(kModel, s, t) - q) <= 0.05);
    ++tested;
  }
  CHECK(tested > 50);
}

TEST_CASE("threshold ordering in illumination and target") {
  const double t_dim = threshold_temperature(kModel, dim_s(), 26.0);
  const double t_office = threshold_temperature(kModel, office_s(), 26.0);
  const double t_day = threshold_temperature(kModel, daylight_s(), 26.0);
  CHECK(t_dim < t_office);
  CHECK(t_office < t_day);

  // Stricter targets shrink the threshold under fixed settings.
  const double t20 = threshold_temperature(kModel, dim_s(), 20.0);
  CHECK(t_dim < t20);
}

TEST_CASE("35 dB under dim light is infeasible") {
  CHECK_THROWS_AS(threshold_temperature(kModel, dim_s(), 35.0),
                  InfeasibleFidelityError);
  // ...but feasible under office light.
  CHECK(threshold_temperature(kModel, office_s(), 35.0) > 0.0);
}

TEST_CASE("every capture at or below the threshold meets the target") {
  const double q = 26.0;
  const double t = threshold_temperature(kModel, dim_s(), q);
  for (double below = 0.0; below <= 5.0; below += 0.5) {
    CHECK(snr_db(kModel, dim_s(), t - below) >= q);
  }
}
