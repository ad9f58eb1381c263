#include "vcontact/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vcontact {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  os << std::setprecision(12);
  return os;
}

void finish_output(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

bool history_monotone(const StateHistory& h) {
  for (const auto& step : h.steps) {
    const auto& values = step.report.history;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i] > values[i - 1]) return false;
    }
  }
  return true;
}

double worst_stationarity(const StateHistory& h) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& step : h.steps) {
    worst = std::max(worst, step.stationarity_gap / (1.0 + std::abs(step.objective)));
  }
  return worst;
}

const char* axis_name(SweepAxis axis) { return axis == SweepAxis::Time ? "time" : "space"; }

}  // namespace

// --- scenarios -----------------------------------------------------------------

const std::vector<std::string>& Scenario::names() {
  static const std::vector<std::string> all{"base", "stiff_gnu", "reversed_f0", "greased", "convergence"};
  return all;
}

Scenario Scenario::named(const std::string& name, int n_per_side, int steps) {
  Scenario s;
  s.name = name;
  s.law = scenario_law(name);
  s.n_per_side = n_per_side;
  s.steps = steps;
  if (name == "convergence") {
    s.f0 = {-1.0, -0.4};
    s.fN = {-0.2, -0.2};
  } else if (name == "reversed_f0") {
    s.f0 = {2.5, -0.5};
  } else {
    s.f0 = {-2.5, -0.5};
  }
  return s;
}

DiscreteProblem Scenario::problem() const { return problem(n_per_side, steps); }

DiscreteProblem Scenario::problem(int n, int N) const {
  return DiscreteProblem::build(Mesh::build_uniform(n), params, LoadData::constant(f0, fN), law,
                                TimeGrid::make(T, N));
}

// --- overrides -----------------------------------------------------------------

namespace {

using nlohmann::json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
  }
}

Eigen::Vector2d read_vec2(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw std::invalid_argument("config: '" + key + "' must be [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

void read_bound(const json& v, BoundFunction& g, const std::string& key) {
  check_keys(v, {"slope", "cap", "zero_from_x"}, key);
  if (v.contains("slope")) g.slope = v["slope"].get<double>();
  if (v.contains("cap")) g.eta_cap = v["cap"].get<double>();
  if (v.contains("zero_from_x")) g.zero_from_x = v["zero_from_x"].get<double>();
  if (g.slope < 0 || !(g.eta_cap > 0)) throw std::invalid_argument("config: '" + key + "' needs slope >= 0, cap > 0");
}

}  // namespace

void apply_overrides(const std::string& json_text, Scenario& s, StepperConfig& cfg) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  check_keys(doc,
             {"phi", "xi", "eta", "lambda", "T", "f0", "fN", "g_nu", "g_tau", "j_tau", "powell", "restart_cap",
              "stationarity_probe", "reduce_interior"},
             "top level");
  try {
    if (doc.contains("phi")) s.params.phi = doc["phi"].get<double>();
    if (doc.contains("xi")) s.params.xi = doc["xi"].get<double>();
    if (doc.contains("eta")) s.params.eta = doc["eta"].get<double>();
    if (doc.contains("lambda")) s.params.lambda = doc["lambda"].get<double>();
    if (doc.contains("T")) s.T = doc["T"].get<double>();
    if (doc.contains("f0")) s.f0 = read_vec2(doc["f0"], "f0");
    if (doc.contains("fN")) s.fN = read_vec2(doc["fN"], "fN");
    if (doc.contains("g_nu")) read_bound(doc["g_nu"], s.law.g_nu, "g_nu");
    if (doc.contains("g_tau")) read_bound(doc["g_tau"], s.law.g_tau, "g_tau");
    if (doc.contains("j_tau")) {
      const auto kind = doc["j_tau"].get<std::string>();
      if (kind == "exp_norm") {
        s.law.j_tau.kind = FrictionKind::ExpNorm;
      } else if (kind == "norm") {
        s.law.j_tau.kind = FrictionKind::Norm;
      } else {
        throw std::invalid_argument("config: j_tau must be \"exp_norm\" or \"norm\"");
      }
    }
    if (doc.contains("powell")) {
      const json& p = doc["powell"];
      check_keys(p, {"tol_abs", "tol_rel", "tol_step", "max_outer_iters", "restart_every", "line_search"}, "powell");
      if (p.contains("tol_abs")) cfg.powell.tol_abs = p["tol_abs"].get<double>();
      if (p.contains("tol_rel")) cfg.powell.tol_rel = p["tol_rel"].get<double>();
      if (p.contains("tol_step")) cfg.powell.tol_step = p["tol_step"].get<double>();
      if (p.contains("max_outer_iters")) cfg.powell.max_outer_iters = p["max_outer_iters"].get<int>();
      if (p.contains("restart_every")) cfg.powell.restart_every = p["restart_every"].get<int>();
      if (p.contains("line_search")) {
        const json& ls = p["line_search"];
        check_keys(ls, {"growth", "tolerance", "max_expansions"}, "powell.line_search");
        if (ls.contains("growth")) cfg.powell.line_search.growth = ls["growth"].get<double>();
        if (ls.contains("tolerance")) cfg.powell.line_search.tolerance = ls["tolerance"].get<double>();
        if (ls.contains("max_expansions")) cfg.powell.line_search.max_expansions = ls["max_expansions"].get<int>();
      }
    }
    if (doc.contains("restart_cap")) cfg.restart_cap = doc["restart_cap"].get<int>();
    if (doc.contains("stationarity_probe")) cfg.stationarity_probe = doc["stationarity_probe"].get<double>();
    if (doc.contains("reduce_interior")) cfg.reduce_interior = doc["reduce_interior"].get<bool>();
  } catch (const json::type_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  s.params.validate();
  cfg.powell.validate();
  if (!(s.T > 0)) throw std::invalid_argument("config: T must be > 0");
}

void apply_override_file(const std::string& path, Scenario& scenario, StepperConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  apply_overrides(buf.str(), scenario, cfg);
}

// --- scenario runs ---------------------------------------------------------------

std::vector<ContactForceSample> contact_forces(const DiscreteProblem& problem, const Eigen::VectorXd& displacement,
                                               const Eigen::VectorXd& velocity) {
  const auto u = contact_trace(problem.quadrature(), problem.dofmap(), displacement);
  const auto v = contact_trace(problem.quadrature(), problem.dofmap(), velocity);
  std::vector<ContactForceSample> rows;
  rows.reserve(u.size());
  for (std::size_t q = 0; q < u.size(); ++q) {
    const double pen = u[q].u_nu;
    rows.push_back({u[q].x.x(), pen, problem.law().g_nu(u[q].x, pen), problem.law().g_tau(u[q].x, pen),
                    v[q].u_tau.x()});
  }
  return rows;
}

ScenarioResult run_scenario(const Scenario& scenario, const StepperConfig& cfg) {
  const DiscreteProblem problem = scenario.problem();
  ScenarioResult r;
  r.scenario = scenario;
  r.history = run(problem, cfg);
  r.contact = contact_forces(problem, r.history.final_displacement(), r.history.final_velocity());
  r.max_penetration = -std::numeric_limits<double>::infinity();
  for (const auto& c : r.contact) r.max_penetration = std::max(r.max_penetration, c.penetration);
  const Eigen::VectorXd full = problem.dofmap().expand(r.history.final_displacement());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < full.size(); i += 2) sum += full[i];
  r.mean_horizontal_displacement = sum / static_cast<double>(problem.mesh().node_count());
  r.worst_stationarity = worst_stationarity(r.history);
  r.monotone = history_monotone(r.history);
  return r;
}

void write_contact_csv(std::ostream& os, const std::vector<ContactForceSample>& rows) {
  os << "x,penetration,normal_pressure,friction_bound,tangential_velocity\r\n";
  for (const auto& r : rows) {
    os << r.x << ',' << r.penetration << ',' << r.normal_pressure << ',' << r.friction_bound << ','
       << r.tangential_velocity << "\r\n";
  }
}

void write_state_csv(std::ostream& os, const DiscreteProblem& problem, const Eigen::VectorXd& displacement,
                     const Eigen::VectorXd& velocity) {
  const Eigen::VectorXd u = problem.dofmap().expand(displacement);
  const Eigen::VectorXd v = problem.dofmap().expand(velocity);
  os << "node,x,y,u_x,u_y,v_x,v_y\r\n";
  const auto& nodes = problem.mesh().nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(2 * i);
    os << i << ',' << nodes[i].x() << ',' << nodes[i].y() << ',' << u[k] << ',' << u[k + 1] << ',' << v[k] << ','
       << v[k + 1] << "\r\n";
  }
}

std::vector<std::string> write_scenario_artifacts(const ScenarioResult& result, const std::string& dir) {
  fs::create_directories(dir);
  const DiscreteProblem problem = result.scenario.problem();
  const Eigen::VectorXd u = problem.dofmap().expand(result.history.final_displacement());
  const Eigen::VectorXd v = problem.dofmap().expand(result.history.final_velocity());
  std::vector<std::string> written;

  const fs::path vtk = fs::path(dir) / "final.vtk";
  write_vtk_file(vtk.string(), problem.mesh(), result.scenario.name + " t=T deformed",
                 {{"displacement", u}, {"velocity", v}}, &u);
  written.push_back(vtk.string());

  const fs::path contact = fs::path(dir) / "contact_forces.csv";
  {
    auto os = open_output(contact);
    write_contact_csv(os, result.contact);
    finish_output(os, contact);
  }
  written.push_back(contact.string());

  const fs::path nodes = fs::path(dir) / "nodes.csv";
  {
    auto os = open_output(nodes);
    write_state_csv(os, problem, result.history.final_displacement(), result.history.final_velocity());
    finish_output(os, nodes);
  }
  written.push_back(nodes.string());

  const fs::path steps = fs::path(dir) / "steps.csv";
  {
    auto os = open_output(steps);
    os << "step,t,objective,v_norm,outer_iters,f_evals,converged,stationarity_gap\r\n";
    const auto& h = result.history;
    for (std::size_t j = 0; j < h.steps.size(); ++j) {
      const auto& s = h.steps[j];
      os << j + 1 << ',' << problem.grid().t(static_cast<int>(j + 1)) << ',' << s.objective << ','
         << v_norm(problem.mesh(), problem.dofmap(), h.velocities[j]) << ',' << s.report.outer_iters << ','
         << s.report.f_evals << ',' << (s.report.converged ? 1 : 0) << ',' << s.stationarity_gap << "\r\n";
    }
    finish_output(os, steps);
  }
  written.push_back(steps.string());
  return written;
}

// --- convergence sweeps ----------------------------------------------------------

namespace {

struct Run {
  DiscreteProblem problem;
  StateHistory history;
};

Run solve_at(const Scenario& s, int n, int N, const StepperConfig& cfg) {
  DiscreteProblem p = s.problem(n, N);
  StateHistory h = run(p, cfg);
  return {std::move(p), std::move(h)};
}

void absorb(ConvergenceReport& report, const Run& r) {
  report.degraded = report.degraded || r.history.degraded;
  report.monotone = report.monotone && history_monotone(r.history);
  report.worst_stationarity = std::max(report.worst_stationarity, worst_stationarity(r.history));
}

void reference_norms(ConvergenceReport& report, const Run& ref) {
  report.reference_norm_final = v_norm(ref.problem.mesh(), ref.problem.dofmap(), ref.history.final_velocity());
  report.reference_norm_max = 0.0;
  for (const auto& v : ref.history.velocities) {
    report.reference_norm_max = std::max(report.reference_norm_max, v_norm(ref.problem.mesh(), ref.problem.dofmap(), v));
  }
}

// Runs reference and levels concurrently; levels are independent solves.
std::pair<Run, std::vector<Run>> solve_all(const Scenario& s, const std::vector<std::pair<int, int>>& level_res,
                                           std::pair<int, int> ref_res, const StepperConfig& cfg) {
  auto ref_future = std::async(std::launch::async, solve_at, std::cref(s), ref_res.first, ref_res.second, std::cref(cfg));
  std::vector<std::future<Run>> futures;
  for (const auto& [n, N] : level_res) {
    futures.push_back(std::async(std::launch::async, solve_at, std::cref(s), n, N, std::cref(cfg)));
  }
  std::vector<Run> levels;
  for (auto& f : futures) levels.push_back(f.get());
  return {ref_future.get(), std::move(levels)};
}

}  // namespace

ConvergenceReport time_sweep(const Scenario& scenario, int n_fixed, const std::vector<int>& levels,
                             int reference_steps, const StepperConfig& cfg, ErrorMeasure measure) {
  if (levels.empty()) throw std::invalid_argument("time_sweep: no levels given");
  for (int N : levels) {
    if (N < 1 || reference_steps % N != 0) {
      throw std::invalid_argument("time_sweep: level 1/" + std::to_string(N) + " is not a multiple of the reference step 1/" +
                                  std::to_string(reference_steps));
    }
  }
  std::vector<std::pair<int, int>> res;
  for (int N : levels) res.emplace_back(n_fixed, N);
  auto [ref, runs] = solve_all(scenario, res, {n_fixed, reference_steps}, cfg);

  ConvergenceReport report;
  report.axis = SweepAxis::Time;
  report.fixed = n_fixed;
  report.reference = reference_steps;
  report.measure = measure;
  reference_norms(report, ref);
  absorb(report, ref);
  const Mesh& mesh = ref.problem.mesh();
  const DofMap& dofs = ref.problem.dofmap();
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Run& r = runs[l];
    absorb(report, r);
    double err;
    if (measure == ErrorMeasure::FinalTime) {
      err = v_norm(mesh, dofs, ref.history.final_velocity() - r.history.final_velocity()) / report.reference_norm_final;
    } else {
      const int stride = reference_steps / levels[l];
      err = 0.0;
      for (int j = 1; j <= levels[l]; ++j) {
        const auto& vr = ref.history.velocities[static_cast<std::size_t>(j * stride - 1)];
        const auto& vk = r.history.velocities[static_cast<std::size_t>(j - 1)];
        err = std::max(err, v_norm(mesh, dofs, vr - vk));
      }
      err /= report.reference_norm_max;
    }
    report.rows.push_back({levels[l], err, std::nullopt});
  }
  compute_orders(report.rows);
  return report;
}

ConvergenceReport space_sweep(const Scenario& scenario, int steps_fixed, const std::vector<int>& levels,
                              int reference_n, const StepperConfig& cfg, ErrorMeasure measure) {
  if (levels.empty()) throw std::invalid_argument("space_sweep: no levels given");
  for (int n : levels) {
    if (n < 1 || reference_n % n != 0) {
      throw std::invalid_argument("space_sweep: mesh 1/" + std::to_string(n) + " is not nested in the reference mesh 1/" +
                                  std::to_string(reference_n));
    }
  }
  std::vector<std::pair<int, int>> res;
  for (int n : levels) res.emplace_back(n, steps_fixed);
  auto [ref, runs] = solve_all(scenario, res, {reference_n, steps_fixed}, cfg);

  ConvergenceReport report;
  report.axis = SweepAxis::Space;
  report.fixed = steps_fixed;
  report.reference = reference_n;
  report.measure = measure;
  reference_norms(report, ref);
  absorb(report, ref);
  const Mesh& fine = ref.problem.mesh();
  const DofMap& fine_dofs = ref.problem.dofmap();
  auto distance = [&](const Run& r, std::size_t j) {
    const Eigen::VectorXd coarse_full = r.problem.dofmap().expand(r.history.velocities[j]);
    const Eigen::VectorXd on_fine = prolongate(r.problem.mesh(), fine, coarse_full);
    return v_norm_full(fine, fine_dofs.expand(ref.history.velocities[j]) - on_fine);
  };
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Run& r = runs[l];
    absorb(report, r);
    double err;
    if (measure == ErrorMeasure::FinalTime) {
      err = distance(r, r.history.velocities.size() - 1) / report.reference_norm_final;
    } else {
      err = 0.0;
      for (std::size_t j = 0; j < r.history.velocities.size(); ++j) err = std::max(err, distance(r, j));
      err /= report.reference_norm_max;
    }
    report.rows.push_back({levels[l], err, std::nullopt});
  }
  compute_orders(report.rows);
  return report;
}

void compute_orders(std::vector<ConvergenceRow>& rows) {
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (l == 0 || rows[l].error <= 0 || rows[l - 1].error <= 0) {
      rows[l].order = std::nullopt;
      continue;
    }
    const double ratio = static_cast<double>(rows[l].resolution) / rows[l - 1].resolution;
    rows[l].order = std::log2(rows[l - 1].error / rows[l].error) / std::log2(ratio);
  }
}

std::optional<double> loglog_slope(const std::vector<ConvergenceRow>& rows, std::size_t first) {
  std::vector<double> xs, ys;
  for (std::size_t l = first; l < rows.size(); ++l) {
    if (!(rows[l].error > 0)) continue;
    xs.push_back(-std::log2(static_cast<double>(rows[l].resolution)));
    ys.push_back(std::log2(rows[l].error));
  }
  if (xs.size() < 2) return std::nullopt;
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
  const double mx = sx / m, my = sy / m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

void emit_loglog(std::ostream& os, const ConvergenceReport& report) {
  const char* var = report.axis == SweepAxis::Time ? "k" : "h";
  os << "# " << axis_name(report.axis) << " sweep: log2(" << var << ") log2(relative error)\n";
  if (auto slope = loglog_slope(report.rows)) os << "# slope " << std::setprecision(6) << *slope << '\n';
  os << std::setprecision(12);
  for (const auto& r : report.rows) {
    os << -std::log2(static_cast<double>(r.resolution)) << ' ' << std::log2(r.error) << '\n';
  }
}

void write_report_table(std::ostream& os, const ConvergenceReport& report) {
  const bool time = report.axis == SweepAxis::Time;
  os << (time ? "Numerical errors for fixed h = 1/" : "Numerical errors for fixed k = 1/") << report.fixed
     << " (reference " << (time ? "k" : "h") << " = 1/" << report.reference << ", "
     << (report.measure == ErrorMeasure::FinalTime ? "final-time velocity" : "max over time steps") << ")\n";
  auto cell = [&](const std::string& s) { os << std::setw(14) << s; };
  os << std::left << std::setw(22) << (time ? "k" : "h") << std::right;
  for (const auto& r : report.rows) cell("1/" + std::to_string(r.resolution));
  os << '\n' << std::left << std::setw(22) << "|v - v_hk|_V / |v|_V" << std::right;
  for (const auto& r : report.rows) {
    std::ostringstream e;
    e << std::scientific << std::setprecision(4) << r.error;
    cell(e.str());
  }
  os << '\n' << std::left << std::setw(22) << "Convergence order" << std::right;
  for (const auto& r : report.rows) {
    std::ostringstream o;
    if (r.order) o << std::fixed << std::setprecision(4) << *r.order;
    cell(o.str());
  }
  os << '\n';
  if (auto slope = loglog_slope(report.rows)) {
    os << "least-squares log-log slope: " << std::fixed << std::setprecision(4) << *slope << '\n';
  }
  os << std::scientific << std::setprecision(5) << "reference |v(T)|_V = " << report.reference_norm_final
     << ", max_j |v(t_j)|_V = " << report.reference_norm_max << '\n';
  os << std::defaultfloat;
}

std::vector<std::string> write_sweep_artifacts(const ConvergenceReport& report, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<std::string> written;
  const fs::path table = fs::path(dir) / "report.txt";
  {
    auto os = open_output(table);
    write_report_table(os, report);
    finish_output(os, table);
  }
  written.push_back(table.string());
  const fs::path dat = fs::path(dir) / "loglog.dat";
  {
    auto os = open_output(dat);
    emit_loglog(os, report);
    finish_output(os, dat);
  }
  written.push_back(dat.string());
  const fs::path csv = fs::path(dir) / "errors.csv";
  {
    auto os = open_output(csv);
    os << "resolution,step,relative_error,order\r\n";
    for (const auto& r : report.rows) {
      os << r.resolution << ',' << 1.0 / r.resolution << ',' << r.error << ',';
      if (r.order) os << *r.order;
      os << "\r\n";
    }
    finish_output(os, csv);
  }
  written.push_back(csv.string());
  return written;
}

int parse_resolution(const std::string& text) {
  std::string digits = text;
  if (digits.rfind("1/", 0) == 0) digits = digits.substr(2);
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != digits.size() || digits.empty() || value < 1) {
    throw std::invalid_argument("invalid resolution '" + text + "' (expected N or 1/N with N >= 1)");
  }
  return value;
}

}  // namespace vcontact
