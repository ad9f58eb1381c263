// vcontact: scenario runs and convergence sweeps for the viscoelastic
// frictional contact solver.
//
//   vcontact solve --scenario base --n 32 --steps 32 --out runs/base
//   vcontact sweep --axis time --fixed 1/32 --levels 2,4,8,16 --ref 1/64 --out runs/time

#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vcontact/harness.hpp"

using namespace vcontact;

namespace {

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_resolution(item));
  }
  if (out.empty()) throw std::invalid_argument("--levels: expected a comma-separated list such as 2,4,8,16");
  return out;
}

int do_solve(const std::string& name, int n, int steps, const std::string& out, const std::string& config) {
  Scenario s = Scenario::named(name, n, steps);
  StepperConfig cfg;
  if (!config.empty()) apply_override_file(config, s, cfg);

  const auto start = std::chrono::steady_clock::now();
  const ScenarioResult r = run_scenario(s, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto files = write_scenario_artifacts(r, out);
  const DiscreteProblem problem = s.problem();
  std::cout << "scenario " << s.name << ": n=" << n << " N=" << steps << " (" << std::fixed << std::setprecision(1)
            << secs << " s)\n";
  std::cout << std::scientific << std::setprecision(5);
  std::cout << "  |v(T)|_V            " << v_norm(problem.mesh(), problem.dofmap(), r.history.final_velocity()) << '\n';
  std::cout << "  max penetration     " << r.max_penetration << '\n';
  std::cout << "  mean u_x at T       " << r.mean_horizontal_displacement << '\n';
  std::cout << "  worst stationarity  " << r.worst_stationarity << '\n';
  if (r.history.degraded) std::cout << "  warning: some steps hit the optimizer iteration limit\n";
  for (const auto& f : files) std::cout << "  wrote " << f << '\n';
  return r.history.degraded ? 2 : 0;
}

int do_sweep(const std::string& axis, const std::string& fixed, const std::string& levels, const std::string& ref,
             const std::string& out, const std::string& config, const std::string& scenario_name,
             const std::string& error) {
  Scenario s = Scenario::named(scenario_name);
  StepperConfig cfg;
  if (!config.empty()) apply_override_file(config, s, cfg);
  const ErrorMeasure measure = error == "max" ? ErrorMeasure::MaxOverSteps : ErrorMeasure::FinalTime;
  const auto lv = parse_levels(levels);

  const auto start = std::chrono::steady_clock::now();
  const ConvergenceReport report = axis == "time"
                                       ? time_sweep(s, parse_resolution(fixed), lv, parse_resolution(ref), cfg, measure)
                                       : space_sweep(s, parse_resolution(fixed), lv, parse_resolution(ref), cfg, measure);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  write_report_table(std::cout, report);
  std::cout << std::fixed << std::setprecision(1) << "(" << secs << " s)\n";
  if (report.degraded) std::cout << "warning: some steps hit the optimizer iteration limit\n";
  for (const auto& f : write_sweep_artifacts(report, out)) std::cout << "wrote " << f << '\n';
  return report.degraded ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasistatic viscoelastic frictional contact: scenario runs and convergence sweeps"};
  app.require_subcommand(1);

  std::string config;

  auto* solve = app.add_subcommand("solve", "Run one scenario and write VTK/CSV artifacts");
  std::string scenario = "base", out = "out";
  int n = 32, steps = 32;
  solve->add_option("--scenario", scenario, "Scenario name")->check(CLI::IsMember(Scenario::names()));
  solve->add_option("--n", n, "Elements per side of the unit square")->check(CLI::PositiveNumber);
  solve->add_option("--steps", steps, "Number of time steps")->check(CLI::PositiveNumber);
  solve->add_option("--out", out, "Output directory");
  solve->add_option("--config", config, "JSON file with parameter overrides")->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Convergence study in k (time) or h (space)");
  std::string axis = "time", fixed = "1/32", levels = "2,4,8,16", ref = "1/64", sweep_out = "out";
  std::string sweep_scenario = "convergence", error = "final";
  sweep->add_option("--axis", axis, "time or space")->check(CLI::IsMember({"time", "space"}));
  sweep->add_option("--fixed", fixed, "Fixed resolution of the other axis, e.g. 1/32");
  sweep->add_option("--levels", levels, "Comma-separated resolutions, e.g. 2,4,8,16");
  sweep->add_option("--ref", ref, "Reference resolution, e.g. 1/64");
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--config", config, "JSON file with parameter overrides")->check(CLI::ExistingFile);
  sweep->add_option("--scenario", sweep_scenario, "Scenario name")->check(CLI::IsMember(Scenario::names()));
  sweep->add_option("--error", error, "final (final-time velocity) or max (max over steps)")
      ->check(CLI::IsMember({"final", "max"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return do_solve(scenario, n, steps, out, config);
    return do_sweep(axis, fixed, levels, ref, sweep_out, config, sweep_scenario, error);
  } catch (const std::exception& e) {
    std::cerr << "vcontact: " << e.what() << '\n';
    return 1;
  }
}
