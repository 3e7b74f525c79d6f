// vsafe: command-line front end (analyze, simulate, report, fis-curve, validate).

#include <CLI11.hpp>

#include <iostream>

#include "vsafe/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace vsafe;
  CLI::App app{"Ring-road traffic safety co-simulator"};
  app.require_subcommand(1);

  cli::AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Fit a driver population from NGSIM trajectories");
  analyze->add_option("input", an.input, "NGSIM-layout CSV")->required();
  analyze->add_option("--out", an.out, "PopulationSpec JSON to write")->capture_default_str();
  analyze->add_option("--figures", an.figures, "Directory for headway/acceleration CSVs");
  analyze->add_flag("--pooled", an.pooled, "Fit per-frame headways instead of per-driver means");

  cli::SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario over one or more seeds");
  simulate->add_option("--config", sim.config, "Scenario JSON")->required();
  simulate->add_option("--seeds", sim.seeds, "Comma-separated seeds, or a count n for seeds 1..n");
  simulate->add_option("--out", sim.out, "Output directory")->capture_default_str();
  bool no_logs = false;
  simulate->add_flag("--no-logs", no_logs, "Skip writing per-seed event logs");

  std::vector<std::string> report_inputs;
  std::string report_out = "report";
  auto* report = app.add_subcommand("report", "Rebuild reports from event logs");
  report->add_option("logs", report_inputs, "Event log files or directories")->required();
  report->add_option("--out", report_out, "Output directory")->capture_default_str();

  std::string fis_config, fis_out = "-";
  int fis_points = 201;
  auto* fis = app.add_subcommand("fis-curve", "Tabulate the fuzzy controller transfer curve");
  fis->add_option("--config", fis_config, "Scenario JSON (default FIS if omitted)");
  fis->add_option("--out", fis_out, "CSV path, - for stdout")->capture_default_str();
  fis->add_option("--points", fis_points, "Samples over [-1, 1]")->capture_default_str();

  cli::ValidateOptions val;
  std::uint64_t val_seed = 0;
  auto* validate = app.add_subcommand("validate", "Check that a scenario replays byte-identically");
  validate->add_option("--config", val.config, "Scenario JSON")->required();
  auto* seed_opt = validate->add_option("--seed", val_seed, "Override the scenario seed");
  validate->add_flag("--inject-nondeterminism", val.inject_nondeterminism)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kUsageError;
  }

  try {
    if (*analyze) return cli::cmd_analyze(an);
    if (*simulate) {
      sim.write_logs = !no_logs;
      return cli::cmd_simulate(sim);
    }
    if (*report) return cli::cmd_report(report_inputs, report_out);
    if (*fis) return cli::cmd_fis_curve(fis_config, fis_out, fis_points);
    if (*validate) {
      if (*seed_opt) val.seed = val_seed;
      return cli::cmd_validate(val);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kUsageError;
  }
  return cli::kUsageError;
}
