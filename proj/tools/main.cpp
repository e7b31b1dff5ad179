#include <iostream>

#include "CLI11.hpp"
#include "coopadapt/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cooperative adaptive payload identification: scenario runner"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir = "out";
  int decimate = 0;
  int seed = 0;
  int jobs = 1;
  bool as_json = false;
  std::vector<std::string> grid;

  auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
  validate->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "Run a scenario and write timeseries.csv, summary.json, scenario.resolved");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--decimate", decimate, "Log every k-th step (overrides the scenario)")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "Reserved; the dynamics are deterministic");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid, one directory per point plus index.json");
  sweep->add_option("--scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--param", grid, "Grid axis path=v1,v2,... (repeatable)")->required();
  sweep->add_option("--decimate", decimate, "Log every k-th step")->check(CLI::NonNegativeNumber);
  sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", seed, "Reserved; the dynamics are deterministic");

  std::string target;
  auto* pe = app.add_subcommand("pe-report", "PE and deficiency report from a run's log");
  pe->add_option("target", target, "Run directory or timeseries.csv")->required();
  pe->add_option("--scenario", scenario, "Scenario file (default: scenario.resolved next to the log)");
  pe->add_flag("--json", as_json, "Emit JSON");

  CLI11_PARSE(app, argc, argv);

  if (*validate) return coopadapt::cmd_validate(scenario, std::cout, std::cerr);
  if (*run) return coopadapt::cmd_run(scenario, out_dir, decimate, std::cout, std::cerr);
  if (*sweep) return coopadapt::cmd_sweep(scenario, out_dir, grid, decimate, jobs, std::cout, std::cerr);
  if (*pe) return coopadapt::cmd_pe_report(target, scenario, as_json, std::cout, std::cerr);
  return 1;
}
