#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vcontact/contact_laws.hpp"
#include "vcontact/fem.hpp"
#include "vcontact/stepper.hpp"

namespace vcontact {

/// A named experiment: material, contact law, constant loads, resolution.
struct Scenario {
  std::string name;
  MaterialParams params;
  ContactLaw law;
  Eigen::Vector2d f0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d fN = Eigen::Vector2d::Zero();
  double T = 1.0;
  int n_per_side = 32;
  int steps = 32;

  static Scenario named(const std::string& name, int n_per_side = 32, int steps = 32);
  static const std::vector<std::string>& names();

  DiscreteProblem problem() const;
  DiscreteProblem problem(int n_per_side, int steps) const;
};

/// Scenario and solver overrides read from a JSON document. Recognized keys
/// (all optional): phi, xi, eta, lambda, T, f0 [x, y], fN [x, y],
/// g_nu / g_tau {slope, cap, zero_from_x}, j_tau ("exp_norm" | "norm"),
/// powell {tol_abs, tol_rel, tol_step, max_outer_iters, restart_every,
/// line_search {growth, tolerance, max_expansions}}, restart_cap,
/// stationarity_probe, reduce_interior. Unknown keys are rejected.
void apply_overrides(const std::string& json_text, Scenario& scenario, StepperConfig& cfg);
void apply_override_file(const std::string& path, Scenario& scenario, StepperConfig& cfg);

/// One row per contact quadrature point at the final time.
struct ContactForceSample {
  double x;
  double penetration;      // u_nu of the final displacement
  double normal_pressure;  // g_nu(x, u_nu)
  double friction_bound;   // g_tau(x, u_nu)
  double tangential_velocity;
};

struct ScenarioResult {
  Scenario scenario;
  StateHistory history;
  std::vector<ContactForceSample> contact;
  double max_penetration = 0.0;
  double mean_horizontal_displacement = 0.0;  // nodal mean of u_x at t = T
  double worst_stationarity = 0.0;  // max_j gap_j / (1 + |L_j(v_j)|)
  bool monotone = true;             // every optimizer history non-increasing
};

ScenarioResult run_scenario(const Scenario& scenario, const StepperConfig& cfg = {});

std::vector<ContactForceSample> contact_forces(const DiscreteProblem& problem, const Eigen::VectorXd& displacement,
                                               const Eigen::VectorXd& velocity);

/// Writes final.vtk, contact_forces.csv, nodes.csv and steps.csv into `dir`
/// (created if missing). Returns the written paths.
std::vector<std::string> write_scenario_artifacts(const ScenarioResult& result, const std::string& dir);

void write_contact_csv(std::ostream& os, const std::vector<ContactForceSample>& rows);
/// node, x, y, u_x, u_y, v_x, v_y at the final time.
void write_state_csv(std::ostream& os, const DiscreteProblem& problem, const Eigen::VectorXd& displacement,
                     const Eigen::VectorXd& velocity);

enum class SweepAxis { Time, Space };
enum class ErrorMeasure { FinalTime, MaxOverSteps };

struct ConvergenceRow {
  int resolution;  // 1/k or 1/h
  double error;    // relative V-norm error
  std::optional<double> order;
};

struct ConvergenceReport {
  SweepAxis axis = SweepAxis::Time;
  int fixed = 0;      // 1/h for time sweeps, 1/k for space sweeps
  int reference = 0;  // reference 1/k or 1/h
  ErrorMeasure measure = ErrorMeasure::FinalTime;
  std::vector<ConvergenceRow> rows;
  double reference_norm_final = 0.0;  // |v_ref(T)|_V
  double reference_norm_max = 0.0;    // max_j |v_ref(t_j)|_V
  bool degraded = false;              // some run hit the optimizer limit
  double worst_stationarity = -std::numeric_limits<double>::infinity();
  bool monotone = true;
};

/// Runs the scenario on a fixed mesh for each number of steps in `levels`
/// and compares final velocities with a run using `reference_steps`.
/// Every level must divide `reference_steps`.
ConvergenceReport time_sweep(const Scenario& scenario, int n_fixed, const std::vector<int>& levels,
                             int reference_steps, const StepperConfig& cfg = {},
                             ErrorMeasure measure = ErrorMeasure::FinalTime);

/// Same over mesh resolutions with a fixed number of steps; coarse solutions
/// are prolongated to the reference mesh. Every level must divide
/// `reference_n`.
ConvergenceReport space_sweep(const Scenario& scenario, int steps_fixed, const std::vector<int>& levels,
                              int reference_n, const StepperConfig& cfg = {},
                              ErrorMeasure measure = ErrorMeasure::FinalTime);

/// Fills in log2(e_{l-1} / e_l) for successive rows.
void compute_orders(std::vector<ConvergenceRow>& rows);

/// Least-squares slope of log2(error) against log2(1 / resolution) over rows
/// [first, end). Empty when fewer than two rows remain.
std::optional<double> loglog_slope(const std::vector<ConvergenceRow>& rows, std::size_t first = 0);

/// Two-column log2 data (log2 of step size, log2 of error) with a fitted
/// slope annotation as a gnuplot comment.
void emit_loglog(std::ostream& os, const ConvergenceReport& report);

/// Plain-text table: resolution / error / order rows.
void write_report_table(std::ostream& os, const ConvergenceReport& report);

/// Writes report.txt, loglog.dat and errors.csv into `dir`.
std::vector<std::string> write_sweep_artifacts(const ConvergenceReport& report, const std::string& dir);

/// Parses "32" or "1/32" into 32.
int parse_resolution(const std::string& text);

}  // namespace vcontact
