#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stagioni/commands.hpp"
#include "stagioni/config.hpp"
#include "stagioni/sim.hpp"

using namespace stagioni;
using namespace stagioni::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("stagioni_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

fs::path write_cfg(const TempDir& dir, const std::string& name,
                   const std::string& text) {
  const fs::path p = dir.path / name;
  std::ofstream(p) << text;
  return p;
}

const char* kQuickMigration = R"(
[scenario]
duration = 40 s
frame_period = 33.333 ms
workload = resnet50
policy = seasonal_migration
[fidelity]
vision_snr = 20 dB
imaging_snr = 26 dB
capture_latency = 20 ms
[environment]
ambient = 25 C
lighting = 3.2 lux
[policy]
gap = 10 C
)";

}  // namespace

TEST_CASE("cmd_run writes trace and metrics and reports summary") {
  TempDir dir;
  const fs::path cfg = write_cfg(dir, "scenario.cfg", kQuickMigration);
  RunOptions opt;
  opt.config = cfg.string();
  opt.out_dir = (dir.path / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitOk);
  CHECK(fs::exists(dir.path / "out" / "trace.csv"));
  CHECK(fs::exists(dir.path / "out" / "metrics.json"));
  CHECK(out.str().find("duty cycle") != std::string::npos);

  std::ifstream tf(dir.path / "out" / "trace.csv");
  std::string header;
  std::getline(tf, header);
  CHECK(header == kTraceCsvHeader);

  std::ifstream mf(dir.path / "out" / "metrics.json");
  const auto j = nlohmann::json::parse(mf);
  const std::set<std::string> expected = {
      "avg_power_w", "duty_cycle",   "migrations_per_s", "frames_total",
      "frames_dropped", "captures", "boundaries"};
  std::set<std::string> got;
  for (auto it = j.begin(); it != j.end(); ++it) got.insert(it.key());
  CHECK(got == expected);
  CHECK(j["duty_cycle"].get<double>() > 0.0);
  CHECK(j["duty_cycle"].get<double>() <= 1.0);
}

TEST_CASE("cmd_run flags invariant violations as config errors") {
  TempDir dir;
  const fs::path cfg = write_cfg(
      dir, "bad.cfg", "[fidelity]\nvision_snr = 30 dB\nimaging_snr = 20 dB\n");
  RunOptions opt;
  opt.config = cfg.string();
  opt.out_dir = (dir.path / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitConfigError);
  CHECK(err.str().find("imaging SNR") != std::string::npos);
}

TEST_CASE("cmd_run reports infeasible fidelity separately") {
  TempDir dir;
  const fs::path cfg = write_cfg(dir, "dim35.cfg", R"(
[scenario]
duration = 10 s
[fidelity]
vision_snr = 20 dB
imaging_snr = 35 dB
[environment]
lighting = 3.2 lux
)");
  RunOptions opt;
  opt.config = cfg.string();
  opt.out_dir = (dir.path / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitInfeasibleFidelity);
  CHECK(err.str().find("35.0 dB") != std::string::npos);
}

TEST_CASE("cmd_run rejects a missing config") {
  RunOptions opt;
  opt.config = "does_not_exist.cfg";
  std::ostringstream out, err;
  CHECK(cmd_run(opt, out, err) == kExitConfigError);
}

TEST_CASE("cmd_sweep emits long-format CSV in input order") {
  TempDir dir;
  const fs::path cfg = write_cfg(dir, "base.cfg", kQuickMigration);
  SweepOptions opt;
  opt.config = cfg.string();
  opt.axis = "ambient";
  opt.values = {"20", "30"};
  opt.out_dir = (dir.path / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_sweep(opt, out, err) == kExitOk);

  std::ifstream f(dir.path / "out" / "sweep.csv");
  std::string line;
  std::getline(f, line);
  CHECK(line == "axis_value,metric,value");
  std::vector<std::string> lines;
  while (std::getline(f, line)) lines.push_back(line);
  CHECK(lines.size() == 12);  // 2 cells x 6 metrics
  CHECK(lines.front().rfind("20,", 0) == 0);
  CHECK(lines.back().rfind("30,", 0) == 0);
}

TEST_CASE("cmd_sweep propagates per-cell infeasibility") {
  TempDir dir;
  const fs::path cfg = write_cfg(dir, "base.cfg", kQuickMigration);
  SweepOptions opt;
  opt.config = cfg.string();
  opt.axis = "fidelity_snr";
  opt.values = {"26", "35", "none"};  // 35 dB infeasible under dim light
  opt.out_dir = (dir.path / "out").string();
  std::ostringstream out, err;
  CHECK(cmd_sweep(opt, out, err) == kExitInfeasibleFidelity);
  CHECK(err.str().find("35") != std::string::npos);

  std::ifstream f(dir.path / "out" / "sweep.csv");
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("35,error,1") != std::string::npos);
  CHECK(text.find("none,avg_power_w") != std::string::npos);
}

TEST_CASE("fidelity sweeps over every preset build the four-by-four panel") {
  // One sweep per workload preset, four fidelity cells each: sixteen row
  // groups of metrics suitable for side-by-side policy plots.
  TempDir dir;
  int groups = 0;
  for (const char* workload :
       {"alexnet", "mobilenet_ssd", "googlenet", "resnet50"}) {
    const std::string cfg_text = std::string(R"(
[scenario]
duration = 20 s
workload = )") + workload + R"(
policy = seasonal_migration
[fidelity]
vision_snr = 20 dB
capture_latency = 20 ms
[environment]
lighting = 320 lux
)";
    const fs::path cfg = write_cfg(dir, std::string(workload) + ".cfg", cfg_text);
    SweepOptions opt;
    opt.config = cfg.string();
    opt.axis = "fidelity_snr";
    opt.values = {"35", "26", "20", "none"};
    opt.out_dir = (dir.path / workload).string();
    std::ostringstream out, err;
    REQUIRE(cmd_sweep(opt, out, err) == kExitOk);

    std::ifstream f(dir.path / workload / "sweep.csv");
    std::string line;
    std::getline(f, line);  // header
    std::set<std::string> axis_values;
    while (std::getline(f, line))
      axis_values.insert(line.substr(0, line.find(',')));
    CHECK(axis_values ==
          std::set<std::string>({"35", "26", "20", "none"}));
    groups += static_cast<int>(axis_values.size());
  }
  CHECK(groups == 16);
}

TEST_CASE("cmd_sweep rejects unknown axes and bad values") {
  TempDir dir;
  const fs::path cfg = write_cfg(dir, "base.cfg", kQuickMigration);
  SweepOptions opt;
  opt.config = cfg.string();
  opt.axis = "voltage";
  opt.values = {"1"};
  std::ostringstream out, err;
  CHECK(cmd_sweep(opt, out, err) == kExitConfigError);

  opt.axis = "ambient";
  opt.values = {"none"};  // only meaningful for fidelity_snr
  CHECK(cmd_sweep(opt, out, err) == kExitConfigError);
}

TEST_CASE("cmd_validate passes on defaults and fails on perturbed models") {
  TempDir dir;
  setenv("STAGIONI_PRESET_DIR", "", 1);
  unsetenv("STAGIONI_PRESET_DIR");

  std::ostringstream out, err;
  CHECK(cmd_validate(ValidateOptions{}, out, err) == kExitOk);
  CHECK(out.str().find("[PASS] steady-state calibration pairs") != std::string::npos);
  CHECK(out.str().find("[FAIL]") == std::string::npos);

  const fs::path cfg = write_cfg(dir, "perturbed.cfg",
                                 "[thermal]\nalpha_jump = 2.75 K/W\n[fidelity]\nimaging_snr = none\n");
  ValidateOptions opt;
  opt.config = cfg.string();
  std::ostringstream out2, err2;
  CHECK(cmd_validate(opt, out2, err2) == kExitValidationFailure);
  CHECK(out2.str().find("[FAIL] junction jump") != std::string::npos);
}

TEST_CASE("cmd_validate reports a missing bundled preset as a config error") {
  TempDir dir;  // empty override directory replaces the preset search path
  setenv("STAGIONI_PRESET_DIR", dir.path.c_str(), 1);
  std::ostringstream out, err;
  const int rc = cmd_validate(ValidateOptions{}, out, err);
  unsetenv("STAGIONI_PRESET_DIR");
  CHECK(rc == kExitConfigError);
  CHECK(err.str().find("resnet_migration.cfg") != std::string::npos);
}

TEST_CASE("cmd_fidelity_curve emits the documented schema") {
  CurveOptions opt;
  opt.lux = 3.2;
  opt.from_c = 40.0;
  opt.to_c = 60.0;
  opt.step_c = 5.0;
  std::ostringstream out, err;
  CHECK(cmd_fidelity_curve(opt, out, err) == kExitOk);
  std::istringstream is(out.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t_die_c,variance,snr_db");
  int rows = 0;
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 5);

  opt.step_c = -1.0;
  std::ostringstream out2, err2;
  CHECK(cmd_fidelity_curve(opt, out2, err2) == kExitConfigError);
}

TEST_CASE("cmd_list_presets shows the workload table") {
  std::ostringstream out;
  CHECK(cmd_list_presets(out) == kExitOk);
  for (const char* name : {"alexnet", "mobilenet_ssd", "googlenet", "resnet50"}) {
    CHECK(out.str().find(name) != std::string::npos);
  }
}

TEST_CASE("config path resolution prefers the environment override") {
  TempDir dir;
  write_cfg(dir, "resnet_migration.cfg", kQuickMigration);
  setenv("STAGIONI_PRESET_DIR", dir.path.c_str(), 1);
  const std::string resolved = config::resolve_config_path("resnet_migration.cfg");
  CHECK(resolved.rfind(dir.path.string(), 0) == 0);
  unsetenv("STAGIONI_PRESET_DIR");
  CHECK_THROWS_AS(config::resolve_config_path("missing_preset.cfg"),
                  config::ConfigError);
}
