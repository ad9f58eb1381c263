#include "vcontact/nsopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace vcontact::nsopt {

namespace {

constexpr double kGolden = 0.3819660112501051;  // 2 - phi
constexpr int kMaxGoldenIters = 400;

double checked(double v, const char* where, double t) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-finite objective value (" << v << ") in " << where << " at step t=" << t;
    throw NonFiniteObjective(msg.str());
  }
  return v;
}

}  // namespace

LineFunction Objective::line(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
  return [this, x, d](double t) { return value(x + t * d); };
}

LineFunction Objective::coordinate_line(const Eigen::VectorXd& x, Eigen::Index i) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
  e[i] = 1.0;
  return line(x, e);
}

CoordinateLines Objective::coordinate_lines(const Eigen::VectorXd& x) const {
  return [this, x](Eigen::Index i) { return coordinate_line(x, i); };
}

void PowellConfig::validate() const {
  if (!(tol_abs > 0 && tol_rel > 0 && tol_step > 0 && line_search.tolerance > 0)) {
    throw std::invalid_argument("PowellConfig: tolerances must be > 0");
  }
  if (max_outer_iters < 1) throw std::invalid_argument("PowellConfig: max_outer_iters must be >= 1");
  if (line_search.growth <= 1.0) throw std::invalid_argument("PowellConfig: bracket growth must be > 1");
  if (line_search.max_expansions < 0) throw std::invalid_argument("PowellConfig: max_expansions must be >= 0");
  if (restart_every < 0) throw std::invalid_argument("PowellConfig: restart_every must be >= 0");
}

LineSearchResult golden_line_search(const LineFunction& phi_raw, double direction_norm,
                                    const LineSearchConfig& cfg) {
  if (!(direction_norm > 0) || !std::isfinite(direction_norm)) {
    throw std::invalid_argument("golden_line_search: direction must be nonzero and finite");
  }
  LineSearchResult out;
  auto phi = [&](double t) {
    ++out.evals;
    return checked(phi_raw(t), "line search", t);
  };

  const double scale = 1.0 / direction_norm;
  const double f0 = phi(0.0);
  out.value = f0;

  // bracket a < b < c with phi(b) <= min(phi(a), phi(c))
  double a = -scale, b = 0.0, c = scale;
  double fa = phi(a), fb = f0, fc = phi(c);
  if (fa < f0 || fc < f0) {
    const double dir = fc <= fa ? 1.0 : -1.0;
    double prev = 0.0, fprev = f0;
    double cur = dir * scale, fcur = dir > 0 ? fc : fa;
    int expansions = 0;
    while (true) {
      const double next = cfg.growth * cur;
      const double fnext = phi(next);
      if (fnext >= fcur) {
        a = prev, fa = fprev;
        b = cur, fb = fcur;
        c = next, fc = fnext;
        break;
      }
      if (++expansions > cfg.max_expansions) {
        out.bracketed = false;
        return out;
      }
      prev = cur, fprev = fcur;
      cur = next, fcur = fnext;
    }
    if (a > c) {
      std::swap(a, c);
      std::swap(fa, fc);
    }
  }

  const double stop_width = cfg.tolerance * (2.0 * scale + std::abs(b));
  for (int it = 0; it < kMaxGoldenIters && (c - a) > stop_width; ++it) {
    const bool right = (c - b) > (b - a);
    const double x = right ? b + kGolden * (c - b) : b - kGolden * (b - a);
    const double fx = phi(x);
    if (fx < fb) {
      if (right) {
        a = b;
      } else {
        c = b;
      }
      b = x, fb = fx;
    } else if (right) {
      c = x;
    } else {
      a = x;
    }
  }
  if (fb < f0) {
    out.step = b;
    out.value = fb;
    out.decrease = f0 - fb;
  }
  return out;
}

LineSearchResult golden_line_search(const Objective& objective, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& d, const LineSearchConfig& cfg) {
  return golden_line_search(objective.line(x, d), d.norm(), cfg);
}

MinimizeReport powell_minimize(const Objective& objective, const Eigen::VectorXd& x0,
                               const PowellConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = objective.dimension();
  if (x0.size() != n) throw std::invalid_argument("powell_minimize: x0 has wrong dimension");

  MinimizeReport rep;
  auto value = [&](const Eigen::VectorXd& x) {
    ++rep.f_evals;
    return checked(objective.value(x), "powell_minimize", 0.0);
  };

  Eigen::VectorXd x = x0;
  double fx = value(x);
  rep.history.push_back(fx);
  if (n == 0) {
    rep.argmin = x;
    rep.value = fx;
    rep.converged = true;
    return rep;
  }

  // A direction is either a coordinate axis (axis >= 0) or a dense vector.
  struct Direction {
    Eigen::Index axis;
    Eigen::VectorXd dense;
  };
  std::vector<Direction> dirs;
  bool plain_basis = false;
  auto reset_basis = [&] {
    dirs.clear();
    for (Eigen::Index i = 0; i < n; ++i) dirs.push_back({i, {}});
    plain_basis = true;
  };
  reset_basis();
  const int restart_every = cfg.restart_every > 0 ? cfg.restart_every : static_cast<int>(n);
  int since_restart = 0;

  // Line search from x along a direction; moves x when the line improves.
  auto search = [&](const LineFunction& line, double norm, auto&& point_at) {
    const LineSearchResult r = golden_line_search(line, norm, cfg.line_search);
    rep.f_evals += r.evals;
    if (r.step == 0.0 || !(r.decrease > 0.0)) return 0.0;
    x = point_at(r.step);
    fx -= r.decrease;
    return r.decrease;
  };

  for (int iter = 1; iter <= cfg.max_outer_iters; ++iter) {
    rep.outer_iters = iter;
    const double f_start = fx;
    const Eigen::VectorXd x_start = x;
    const bool swept_basis = plain_basis;
    double biggest = 0.0;
    std::size_t i_biggest = 0;

    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const Direction& dir = dirs[i];
      double drop;
      if (dir.axis >= 0) {
        const Eigen::Index axis = dir.axis;
        drop = search(objective.coordinate_line(x, axis), 1.0, [&](double t) {
          Eigen::VectorXd xn = x;
          xn[axis] += t;
          return xn;
        });
      } else {
        drop = search(objective.line(x, dir.dense), dir.dense.norm(),
                      [&](double t) -> Eigen::VectorXd { return x + t * dir.dense; });
      }
      if (drop > biggest) {
        biggest = drop;
        i_biggest = i;
      }
    }
    rep.history.push_back(fx);

    Eigen::VectorXd d_new = x - x_start;
    const double moved = d_new.cwiseAbs().maxCoeff();
    const bool small = f_start - fx <= cfg.tol_abs + cfg.tol_rel * std::abs(fx) &&
                       moved <= cfg.tol_step * (1.0 + x.cwiseAbs().maxCoeff());
    if (small) {
      if (swept_basis) {
        rep.converged = true;
        break;
      }
      reset_basis();
      since_restart = 0;
      continue;
    }

    if (moved > 0.0) {
      // Values relative to f_start: the sweep end sits at t = 1, the
      // extrapolated point at t = 2.
      const LineFunction along = objective.line(x_start, d_new);
      rep.f_evals += 2;
      const double f_ext = checked(along(2.0), "powell_minimize", 2.0) - checked(along(0.0), "powell_minimize", 0.0);
      const double f_end = fx - f_start;
      if (f_ext < 0.0) {
        const double s1 = -f_end - biggest;
        const double s2 = -f_ext;
        const double test = 2.0 * (-2.0 * f_end + f_ext) * s1 * s1 - biggest * s2 * s2;
        if (test < 0.0) {
          search(objective.line(x, d_new), d_new.norm(),
                 [&](double t) -> Eigen::VectorXd { return x + t * d_new; });
          dirs[i_biggest] = std::move(dirs.back());
          dirs.back() = {-1, std::move(d_new)};
          plain_basis = false;
        }
      }
    }
    if (++since_restart >= restart_every) {
      reset_basis();
      since_restart = 0;
    }
  }

  rep.value = value(x);
  rep.argmin = std::move(x);
  return rep;
}

MinimizeReport powell_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& x0, const PowellConfig& cfg) {
  return powell_minimize(FunctionObjective(x0.size(), f), x0, cfg);
}

double stationarity_gap(const Objective& objective, const Eigen::VectorXd& x, double h_probe) {
  if (!(h_probe > 0)) throw std::invalid_argument("stationarity_gap: h_probe must be > 0");
  double gap = -std::numeric_limits<double>::infinity();
  const CoordinateLines lines = objective.coordinate_lines(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const LineFunction line = lines(i);
    const double f0 = line(0.0);
    gap = std::max(gap, (f0 - line(h_probe)) / h_probe);
    gap = std::max(gap, (f0 - line(-h_probe)) / h_probe);
  }
  return gap;
}

double stationarity_gap(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                        double h_probe) {
  return stationarity_gap(FunctionObjective(x.size(), f), x, h_probe);
}

}  // namespace vcontact::nsopt
