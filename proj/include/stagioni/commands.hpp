#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stagioni/sim.hpp"

namespace stagioni::cli {

/// Exit-code contract shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitInfeasibleFidelity = 2;
inline constexpr int kExitValidationFailure = 3;

struct RunOptions {
  std::string config;   ///< path or bundled preset name
  std::string out_dir = ".";
  std::string format = "csv";  ///< trace format: csv | json
};

struct SweepOptions {
  std::string config;
  std::string axis;
  std::vector<std::string> values;  ///< numbers, or "none" on the fidelity axis
  std::string out_dir = ".";
};

struct ValidateOptions {
  std::string config;  ///< optional model-override config
};

struct CurveOptions {
  std::string config;  ///< optional noise/settings source
  double lux = 32000.0;
  std::optional<double> exposure_ms;
  std::optional<double> iso;
  double from_c = 20.0;
  double to_c = 110.0;
  double step_c = 1.0;
  std::string out_path;  ///< empty = stdout
};

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_fidelity_curve(const CurveOptions& opt, std::ostream& out, std::ostream& err);
int cmd_list_presets(std::ostream& out);

/// Fixed trace schema shared by the CSV emitter and its tests.
inline constexpr const char* kTraceCsvHeader =
    "time_s,mode,site,t_die_c,t_pkg_c,p_system_w,event";

void write_trace_csv(std::ostream& out, const std::vector<sim::TraceRow>& rows);
void write_metrics_json(std::ostream& out, const sim::Metrics& metrics);
void write_sweep_csv(std::ostream& out, const std::vector<sim::SweepCell>& cells);

}  // namespace stagioni::cli
