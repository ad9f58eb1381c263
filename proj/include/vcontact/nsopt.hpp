#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vcontact::nsopt {

using LineFunction = std::function<double(double)>;
using CoordinateLines = std::function<LineFunction(Eigen::Index)>;

/// A scalar objective over R^n accessed by value only.
///
/// `line` returns the restriction t -> value(x + t d) - c, where the constant
/// c may depend on x and d but not on t. Only differences of line values are
/// ever compared, so overrides can drop c and sum increments only, keeping
/// precision in the step size when the objective value itself is large. The
/// default builds the trial point for every call (c = 0).
class Objective {
 public:
  virtual ~Objective() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual LineFunction line(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const;
  /// Restriction along the i-th coordinate axis.
  virtual LineFunction coordinate_line(const Eigen::VectorXd& x, Eigen::Index i) const;
  /// Factory for the restrictions along every axis through one base point,
  /// letting implementations share per-point work across axes.
  virtual CoordinateLines coordinate_lines(const Eigen::VectorXd& x) const;
};

/// Wraps a plain callable.
class FunctionObjective final : public Objective {
 public:
  FunctionObjective(Eigen::Index dim, std::function<double(const Eigen::VectorXd&)> f)
      : dim_(dim), f_(std::move(f)) {}
  Eigen::Index dimension() const override { return dim_; }
  double value(const Eigen::VectorXd& x) const override { return f_(x); }

 private:
  Eigen::Index dim_;
  std::function<double(const Eigen::VectorXd&)> f_;
};

struct LineSearchConfig {
  double growth = 2.0;         // bracket expansion factor
  double tolerance = 1e-10;    // final bracket width relative to the initial one
  int max_expansions = 60;
};

struct PowellConfig {
  double tol_abs = 1e-10;
  double tol_rel = 1e-8;
  /// A sweep is small when its decrease is at most tol_abs + tol_rel |f| and
  /// it moves no coordinate by more than tol_step (1 + max |x_i|).
  double tol_step = 1e-9;
  int max_outer_iters = 200;
  LineSearchConfig line_search;
  /// Sweeps between resets of the direction set to the coordinate basis;
  /// 0 means the problem dimension.
  int restart_every = 0;

  void validate() const;
};

struct MinimizeReport {
  Eigen::VectorXd argmin;
  double value = 0.0;  // fresh evaluation at argmin
  int outer_iters = 0;
  long f_evals = 0;
  bool converged = false;
  /// Objective value after each outer sweep (first entry: value at x0),
  /// accumulated from line-search decreases; never increases.
  std::vector<double> history;
};

struct LineSearchResult {
  double step = 0.0;
  double value = 0.0;     // phi(step)
  double decrease = 0.0;  // phi(0) - phi(step) >= 0
  bool bracketed = true;
  long evals = 0;
};

/// Thrown when the objective returns NaN or +-inf.
class NonFiniteObjective : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimizes phi(t) = f(x + t d) for a line restriction `phi`. The initial
/// bracket is [-1, 1] / |d| and is expanded geometrically in the downhill
/// direction until it encloses a minimum; golden-section search then shrinks
/// it. The returned step never increases phi above phi(0); when no bracket
/// is found within cfg.max_expansions the step is 0 and `bracketed` false.
LineSearchResult golden_line_search(const LineFunction& phi, double direction_norm,
                                    const LineSearchConfig& cfg);

/// Convenience overload building the restriction from an objective.
LineSearchResult golden_line_search(const Objective& objective, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& d, const LineSearchConfig& cfg);

/// Powell's conjugate direction method.
///
/// Each outer sweep line-searches along every direction of the current set,
/// then tries the sweep displacement as a new direction, replacing the
/// direction of largest decrease when Powell's acceptance test allows it.
/// The set is reset to the coordinate basis every `restart_every` sweeps and
/// whenever a sweep is small (see PowellConfig::tol_step); convergence is
/// declared only when a sweep over the plain coordinate basis is small.
MinimizeReport powell_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                               const PowellConfig& cfg = {});

MinimizeReport powell_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, const PowellConfig& cfg = {});

/// max over the 2n signed coordinate directions e of
/// (f(x) - f(x + h e)) / h. For convex f, a value <= eps certifies
/// eps-approximate coordinate-wise stationarity.
double stationarity_gap(const Objective& objective, const Eigen::VectorXd& x, double h_probe);

double stationarity_gap(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x, double h_probe);

}  // namespace vcontact::nsopt
