#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "stagioni/config.hpp"

using namespace stagioni;
using config::ConfigError;
using config::parse_string;

namespace {

const char* kComplete = R"(
# full-featured config
[scenario]
duration = 90 s
frame_period = 33.333 ms
workload = googlenet
policy = stop_capture_go
seed = 42

[fidelity]
vision_snr = 18 dB
imaging_snr = 30 dB
capture_latency = 50 ms

[environment]
ambient = 0: 20, 45: 35 C
lighting = 320 lux

[triggers]
at = 10 s, 20.5 s
random_count = 2

[policy]
gap = 12 C
stop_frames = 2
p_cap_near = 150 mW

[thermal]
alpha_jump = 5.0 K/W
tau_die = 4 ms

[energy]
sensing = 600 pJ

[noise]
doubling_temp = 7 C
)";

}  // namespace

TEST_CASE("complete config round-trips into a scenario") {
  const sim::Scenario s = parse_string(kComplete, "test.cfg");
  CHECK(s.duration_s == doctest::Approx(90.0));
  CHECK(s.frame_period_s == doctest::Approx(0.033333));
  CHECK(s.workload == "googlenet");
  CHECK(s.policy == policy::PolicyKind::stop_capture_go);
  CHECK(s.rng_seed == 42);
  CHECK(s.fidelity.vision_snr_db == 18.0);
  CHECK(*s.fidelity.imaging_snr_db == 30.0);
  CHECK(s.fidelity.capture_latency_s == doctest::Approx(0.05));
  REQUIRE(s.ambient_trace.size() == 2);
  CHECK(s.ambient_trace[1].time_s == 45.0);
  CHECK(s.ambient_trace[1].value == 35.0);
  CHECK(s.lighting_trace.size() == 1);
  REQUIRE(s.trigger_times_s.size() == 2);
  CHECK(s.trigger_times_s[1] == doctest::Approx(20.5));
  CHECK(s.random_trigger_count == 2);
  CHECK(s.gap.kind == policy::GapStrategy::Kind::fixed);
  CHECK(s.gap.fixed_gap_c == 12.0);
  CHECK(s.stop_frames == 2);
  CHECK(*s.p_cap_near_w == doctest::Approx(0.15));
  CHECK(s.stack.alpha_jump_kpw == 5.0);
  CHECK(s.stack.tau_die_s == doctest::Approx(0.004));
  CHECK(s.table.sensing_pj == 600.0);
  CHECK(s.noise.doubling_temp_c == 7.0);
}

TEST_CASE("defaults apply when sections are omitted") {
  const sim::Scenario s = parse_string("[scenario]\nduration = 10 s\n");
  CHECK(s.workload == "resnet50");
  CHECK(s.policy == policy::PolicyKind::seasonal_migration);
  CHECK(s.gap.kind == policy::GapStrategy::Kind::optimize);
  CHECK(s.stack.alpha_jump_kpw == 5.5);
}

TEST_CASE("unknown keys and sections are rejected with location") {
  try {
    parse_string("[scenario]\nduratoin = 10 s\n", "bad.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.cfg:2") != std::string::npos);
    CHECK(std::string(e.what()).find("duratoin") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_string("[thermic]\nr_ca = 1 K/W\n"), ConfigError);
  CHECK_THROWS_AS(parse_string("duration = 10 s\n"), ConfigError);  // no section
}

TEST_CASE("unit mismatches are rejected") {
  CHECK_THROWS_WITH_AS(parse_string("[scenario]\nduration = 10 W\n", "u.cfg"),
                       doctest::Contains("does not measure time"), ConfigError);
  CHECK_THROWS_AS(parse_string("[fidelity]\nvision_snr = 20 lux\n"), ConfigError);
  CHECK_THROWS_AS(parse_string("[policy]\np_cap_near = 0.1 C\n"), ConfigError);
  CHECK_THROWS_AS(parse_string("[environment]\nambient = 25 dB\n"), ConfigError);
  CHECK_THROWS_AS(parse_string("[noise]\ngain_k = 1 dB\n"), ConfigError);  // unitless
  // base units may be left implicit
  const sim::Scenario s = parse_string("[scenario]\nduration = 12\n");
  CHECK(s.duration_s == 12.0);
}

TEST_CASE("scenario invariants surface as config errors") {
  const char* bad_fidelity =
      "[fidelity]\nvision_snr = 30 dB\nimaging_snr = 20 dB\n";
  CHECK_THROWS_WITH_AS(parse_string(bad_fidelity),
                       doctest::Contains("imaging SNR must be >= vision SNR"),
                       ConfigError);

  CHECK_THROWS_AS(parse_string("[scenario]\nduration = -3 s\n"), ConfigError);
  CHECK_THROWS_AS(
      parse_string("[scenario]\nduration = 10 s\n[triggers]\nat = 50 s\n"),
      ConfigError);
}

TEST_CASE("explicit bounds need both ends ordered") {
  CHECK_THROWS_AS(parse_string("[policy]\nt_high = 60 C\n"), ConfigError);
  const sim::Scenario s = parse_string(
      "[policy]\nt_high = 60 C\nt_low = 50 C\n[fidelity]\nimaging_snr = none\n");
  REQUIRE(s.explicit_bounds_c.has_value());
  CHECK(s.explicit_bounds_c->first == 60.0);
  CHECK(s.explicit_bounds_c->second == 50.0);
}

TEST_CASE("custom workload profiles load from config") {
  const char* text = R"(
[scenario]
workload = custom
[workload]
name = edge_tracker
resolution = 1280x720
fps = 24
compute_power = 1.2 W
traffic_multiplier = 3.5
)";
  const sim::Scenario s = parse_string(text);
  REQUIRE(s.custom_profile.has_value());
  CHECK(s.custom_profile->name == "edge_tracker");
  CHECK(s.custom_profile->width_px == 1280);
  CHECK(s.custom_profile->fps == 24.0);
  CHECK(s.resolve_profile().compute_power_w == doctest::Approx(1.2));
}

TEST_CASE("nsp_power override applies to presets") {
  const sim::Scenario s = parse_string(
      "[scenario]\nworkload = resnet50\n[workload]\nnsp_power = 2.5 W\n");
  CHECK(s.resolve_profile().p_nsp_near_sensor_w(s.table) ==
        doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("trace syntax errors") {
  CHECK_THROWS_WITH_AS(
      parse_string("[environment]\nambient = 5: 20, 45: 35 C\n"),
      doctest::Contains("start at time 0"), ConfigError);
  CHECK_THROWS_AS(parse_string("[environment]\nambient = abc C\n"), ConfigError);
}
