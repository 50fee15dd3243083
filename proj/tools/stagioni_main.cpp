// Command-line front end: run scenarios, sweep parameters, validate the
// models against their characterized numbers, and emit fidelity curves.

#include <iostream>

#include <CLI11.hpp>

#include "stagioni/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"near-sensor vision thermal/energy/fidelity policy simulator"};
  app.require_subcommand(1);

  stagioni::cli::RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run one scenario, write trace + metrics");
  run->add_option("--config", run_opt.config, "scenario config path or preset name")
      ->required();
  run->add_option("--out", run_opt.out_dir, "output directory (default .)");
  run->add_option("--format", run_opt.format, "trace format: csv | json");

  stagioni::cli::SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "run one scenario per axis value");
  sweep->add_option("--config", sweep_opt.config, "base scenario config")->required();
  sweep->add_option("--axis", sweep_opt.axis,
                    "nsp_power | fidelity_snr | ambient | gap")
      ->required();
  sweep->add_option("--values", sweep_opt.values,
                    "axis values ('none' = fidelity don't-care)")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", sweep_opt.out_dir, "output directory (default .)");

  stagioni::cli::ValidateOptions val_opt;
  CLI::App* validate =
      app.add_subcommand("validate", "run the built-in regression checks");
  validate->add_option("--config", val_opt.config,
                       "optional config whose model overrides are validated");

  stagioni::cli::CurveOptions curve_opt;
  CLI::App* curve = app.add_subcommand(
      "fidelity-curve", "emit (temperature, variance, snr) CSV for one setting");
  curve->add_option("--config", curve_opt.config, "optional noise-model source");
  curve->add_option("--lux", curve_opt.lux, "scene illumination (default daylight)");
  double exposure = 0.0, iso = 0.0;
  CLI::Option* exp_opt = curve->add_option("--exposure", exposure, "override exposure, ms");
  CLI::Option* iso_opt = curve->add_option("--iso", iso, "override ISO");
  curve->add_option("--from", curve_opt.from_c, "start temperature, C");
  curve->add_option("--to", curve_opt.to_c, "end temperature, C");
  curve->add_option("--step", curve_opt.step_c, "temperature step, C");
  curve->add_option("--out", curve_opt.out_path, "output file (default stdout)");

  CLI::App* presets = app.add_subcommand("list-presets", "list workload and scenario presets");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return stagioni::cli::cmd_run(run_opt, std::cout, std::cerr);
  if (sweep->parsed())
    return stagioni::cli::cmd_sweep(sweep_opt, std::cout, std::cerr);
  if (validate->parsed())
    return stagioni::cli::cmd_validate(val_opt, std::cout, std::cerr);
  if (curve->parsed()) {
    if (exp_opt->count() > 0) curve_opt.exposure_ms = exposure;
    if (iso_opt->count() > 0) curve_opt.iso = iso;
    return stagioni::cli::cmd_fidelity_curve(curve_opt, std::cout, std::cerr);
  }
  if (presets->parsed()) return stagioni::cli::cmd_list_presets(std::cout);
  return 0;
}
