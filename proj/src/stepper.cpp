#include "vcontact/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace vcontact {

namespace {

struct PointTerm {
  Eigen::Index q;
  double tx, ty;  // trace at the base point
  double dx, dy;  // trace of the direction
  double base;    // contact term at the base point
};

// Quadrature points touched by a direction whose trace is `td`.
std::vector<PointTerm> touched_points(const FrozenContact& contact, const Eigen::VectorXd& tx,
                                      const Eigen::VectorXd& td) {
  std::vector<PointTerm> out;
  for (Eigen::Index q = 0; q < tx.size() / 2; ++q) {
    if (td[2 * q] != 0.0 || td[2 * q + 1] != 0.0) {
      out.push_back({q, tx[2 * q], tx[2 * q + 1], td[2 * q], td[2 * q + 1],
                     contact.point_value(q, tx[2 * q], tx[2 * q + 1])});
    }
  }
  return out;
}

// phi(t) - phi(0) = t g1 + t^2 g2 / 2 + changes at the touched points. Only
// increments are summed, so the line keeps full relative precision in its
// own step size however large the objective value is.
nsopt::LineFunction quadratic_plus_contact(const FrozenContact* contact, double g1, double g2,
                                           std::vector<PointTerm> pts) {
  return [=, pts = std::move(pts)](double t) {
    if (t == 0.0) return 0.0;
    double v = t * g1 + 0.5 * t * t * g2;
    for (const auto& p : pts) v += contact->point_value(p.q, p.tx + t * p.dx, p.ty + t * p.dy) - p.base;
    return v;
  };
}

Eigen::VectorXd sparse_column(const SparseMatrix& m, Eigen::Index col) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m.rows());
  for (SparseMatrix::InnerIterator it(m, col); it; ++it) out[it.row()] = it.value();
  return out;
}

}  // namespace

TimeGrid TimeGrid::make(double T, int N) {
  if (N < 1) throw std::invalid_argument("TimeGrid: N must be >= 1, got " + std::to_string(N));
  if (!(T > 0)) throw std::invalid_argument("TimeGrid: T must be > 0");
  return {T, N};
}

DiscreteProblem DiscreteProblem::build(const Mesh& mesh, const MaterialParams& params, const LoadData& loads,
                                       const ContactLaw& law, const TimeGrid& grid, Eigen::VectorXd u0h) {
  params.validate();
  TimeGrid::make(grid.T, grid.N);
  DiscreteProblem p(mesh);
  p.dofmap_ = DofMap::clamped(mesh);
  p.quad_ = ContactQuadrature::build(mesh);
  p.params_ = params;
  p.A_ = assemble_viscosity(mesh, params, p.dofmap_);
  p.B_ = assemble_elasticity(mesh, params, p.dofmap_);
  p.trace_ = p.quad_.trace_matrix(p.dofmap_);
  if (loads.time_independent) {
    p.loads_.push_back(assemble_load(mesh, loads, 0.0, p.dofmap_));
  } else {
    for (int j = 0; j <= grid.N; ++j) p.loads_.push_back(assemble_load(mesh, loads, grid.t(j), p.dofmap_));
  }
  p.law_ = law;
  p.grid_ = grid;
  if (u0h.size() == 0) u0h = Eigen::VectorXd::Zero(p.dofmap_.free_count());
  if (u0h.size() != p.dofmap_.free_count()) {
    throw std::invalid_argument("DiscreteProblem: initial displacement has wrong size");
  }
  p.u0h_ = std::move(u0h);
  p.reduction_ = std::make_shared<const ContactReduction>(p);
  return p;
}

const Eigen::VectorXd& DiscreteProblem::load(int j) const {
  if (j < 0 || j > grid_.N) throw std::out_of_range("DiscreteProblem::load: time index out of range");
  return loads_.size() == 1 ? loads_.front() : loads_[static_cast<std::size_t>(j)];
}

const ContactReduction& DiscreteProblem::reduction() const { return *reduction_; }

DiscreteProblem DiscreteProblem::with_law(const ContactLaw& law) const {
  DiscreteProblem copy = *this;
  copy.law_ = law;
  return copy;
}

// --- FrozenContact ---------------------------------------------------------

FrozenContact FrozenContact::freeze(const DiscreteProblem& problem, const Eigen::VectorXd& d_prev) {
  const auto& points = problem.quadrature().points();
  const Eigen::VectorXd prior = problem.trace() * d_prev;
  const ContactLaw& law = problem.law();
  FrozenContact fc;
  fc.normal.resize(static_cast<Eigen::Index>(points.size()));
  fc.tangential.resize(static_cast<Eigen::Index>(points.size()));
  fc.j_tau = law.j_tau;
  for (std::size_t q = 0; q < points.size(); ++q) {
    const auto qi = static_cast<Eigen::Index>(q);
    const double eta_nu = normal_component(prior.segment<2>(2 * qi));
    fc.normal[qi] = points[q].weight * law.g_nu(points[q].x, eta_nu);
    fc.tangential[qi] = points[q].weight * law.g_tau(points[q].x, eta_nu);
  }
  return fc;
}

double FrozenContact::point_value(Eigen::Index q, double tx, double ty) const {
  const Eigen::Vector2d xi(tx, ty);
  double v = normal[q] * normal_component(xi);
  if (tangential[q] != 0.0) v += tangential[q] * j_tau(tangential_component(xi));
  return v;
}

double FrozenContact::value(const Eigen::VectorXd& trace) const {
  double total = 0.0;
  for (Eigen::Index q = 0; q < normal.size(); ++q) total += point_value(q, trace[2 * q], trace[2 * q + 1]);
  return total;
}

// --- StepFunctional ----------------------------------------------------------

StepFunctional::StepFunctional(const DiscreteProblem& problem, int j, const Eigen::VectorXd& d_prev)
    : problem_(&problem) {
  if (j < 1 || j > problem.grid().N) throw std::out_of_range("make_Lj: step index out of range");
  if (d_prev.size() != problem.dofmap().free_count()) {
    throw std::invalid_argument("make_Lj: displacement has wrong size");
  }
  linear_ = problem.elasticity() * d_prev - problem.load(j);
  contact_ = FrozenContact::freeze(problem, d_prev);
}

double StepFunctional::value(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd aw = problem_->viscosity() * w;
  return 0.5 * w.dot(aw) + linear_.dot(w) + contact_.value(problem_->trace() * w);
}

Eigen::VectorXd StepFunctional::smooth_gradient(const Eigen::VectorXd& w) const {
  return problem_->viscosity() * w + linear_;
}

nsopt::LineFunction StepFunctional::line(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
  const SparseMatrix& A = problem_->viscosity();
  const Eigen::VectorXd ax = A * x;
  const Eigen::VectorXd ad = A * d;
  const Eigen::VectorXd tx = problem_->trace() * x;
  auto pts = touched_points(contact_, tx, problem_->trace() * d);
  return quadratic_plus_contact(&contact_, d.dot(ax) + linear_.dot(d), d.dot(ad), std::move(pts));
}

nsopt::CoordinateLines StepFunctional::coordinate_lines(const Eigen::VectorXd& x) const {
  const SparseMatrix& A = problem_->viscosity();
  const SparseMatrix& T = problem_->trace();
  Eigen::VectorXd ax = A * x;
  Eigen::VectorXd tx = T * x;
  Eigen::VectorXd point_values(tx.size() / 2);
  for (Eigen::Index q = 0; q < point_values.size(); ++q) {
    point_values[q] = contact_.point_value(q, tx[2 * q], tx[2 * q + 1]);
  }
  return [this, &A, &T, ax = std::move(ax), tx = std::move(tx),
          point_values = std::move(point_values)](Eigen::Index i) -> nsopt::LineFunction {
    std::vector<PointTerm> pts;
    for (SparseMatrix::InnerIterator it(T, i); it; ++it) {
      const Eigen::Index q = it.row() / 2;
      if (pts.empty() || pts.back().q != q) pts.push_back({q, tx[2 * q], tx[2 * q + 1], 0.0, 0.0, point_values[q]});
      (it.row() % 2 == 0 ? pts.back().dx : pts.back().dy) = it.value();
    }
    return quadratic_plus_contact(&contact_, ax[i] + linear_[i], A.coeff(i, i), std::move(pts));
  };
}

nsopt::LineFunction StepFunctional::coordinate_line(const Eigen::VectorXd& x, Eigen::Index i) const {
  return coordinate_lines(x)(i);
}

StepFunctional make_Lj(const DiscreteProblem& problem, int j, const Eigen::VectorXd& d_prev) {
  return StepFunctional(problem, j, d_prev);
}

// --- ContactReduction --------------------------------------------------------

ContactReduction::ContactReduction(const DiscreteProblem& problem) {
  const DofMap& dofs = problem.dofmap();
  const Mesh& mesh = problem.mesh();
  std::vector<int> block_index(static_cast<std::size_t>(dofs.free_count()));
  std::vector<bool> on_contact(static_cast<std::size_t>(dofs.free_count()));
  for (Eigen::Index f = 0; f < dofs.free_count(); ++f) {
    const int node = dofs.free_dofs()[static_cast<std::size_t>(f)] / 2;
    const bool c = mesh.node(node).y() == 0.0;
    on_contact[static_cast<std::size_t>(f)] = c;
    auto& list = c ? contact_ : interior_;
    block_index[static_cast<std::size_t>(f)] = static_cast<int>(list.size());
    list.push_back(static_cast<int>(f));
  }
  const auto nc = static_cast<Eigen::Index>(contact_.size());
  const auto ni = static_cast<Eigen::Index>(interior_.size());

  std::vector<Eigen::Triplet<double>> ii, ci, cc;
  const SparseMatrix& A = problem.viscosity();
  for (Eigen::Index k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto c = static_cast<std::size_t>(it.col());
      const int br = block_index[r], bc = block_index[c];
      if (!on_contact[r] && !on_contact[c]) ii.emplace_back(br, bc, it.value());
      if (on_contact[r] && !on_contact[c]) ci.emplace_back(br, bc, it.value());
      if (on_contact[r] && on_contact[c]) cc.emplace_back(br, bc, it.value());
    }
  }
  SparseMatrix a_ii(ni, ni), a_cc(nc, nc);
  a_ii.setFromTriplets(ii.begin(), ii.end());
  a_cc.setFromTriplets(cc.begin(), cc.end());
  a_ci_.resize(nc, ni);
  a_ci_.setFromTriplets(ci.begin(), ci.end());

  a_ii_.compute(a_ii);
  if (a_ii_.info() != Eigen::Success) {
    throw std::runtime_error("ContactReduction: Cholesky factorization of the interior block failed");
  }
  const Eigen::MatrixXd a_ic = Eigen::MatrixXd(a_ci_.transpose());
  coupling_ = a_ii_.solve(a_ic);
  schur_ = Eigen::MatrixXd(a_cc) - a_ci_ * coupling_;
  schur_ = 0.5 * (schur_ + schur_.transpose()).eval();

  const SparseMatrix& T = problem.trace();
  std::vector<Eigen::Triplet<double>> tc;
  for (Eigen::Index j = 0; j < nc; ++j) {
    for (SparseMatrix::InnerIterator it(T, contact_[static_cast<std::size_t>(j)]); it; ++it) {
      tc.emplace_back(it.row(), j, it.value());
    }
  }
  trace_c_.resize(T.rows(), nc);
  trace_c_.setFromTriplets(tc.begin(), tc.end());
}

ContactReduction::Affine ContactReduction::reduce(const Eigen::VectorXd& linear_full) const {
  Eigen::VectorXd c_i(static_cast<Eigen::Index>(interior_.size()));
  Eigen::VectorXd c_c(static_cast<Eigen::Index>(contact_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) c_i[static_cast<Eigen::Index>(k)] = linear_full[interior_[k]];
  for (std::size_t k = 0; k < contact_.size(); ++k) c_c[static_cast<Eigen::Index>(k)] = linear_full[contact_[k]];
  Affine out;
  out.shift = a_ii_.solve(c_i);
  out.linear = c_c - a_ci_ * out.shift;
  out.constant = -0.5 * c_i.dot(out.shift);
  return out;
}

Eigen::VectorXd ContactReduction::lift(const Eigen::VectorXd& w_contact, const Affine& affine) const {
  const Eigen::VectorXd w_i = -affine.shift - coupling_ * w_contact;
  Eigen::VectorXd full(static_cast<Eigen::Index>(contact_.size() + interior_.size()));
  for (std::size_t k = 0; k < interior_.size(); ++k) full[interior_[k]] = w_i[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < contact_.size(); ++k) full[contact_[k]] = w_contact[static_cast<Eigen::Index>(k)];
  return full;
}

Eigen::VectorXd ContactReduction::gather_contact(const Eigen::VectorXd& w_full) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(contact_.size()));
  for (std::size_t k = 0; k < contact_.size(); ++k) out[static_cast<Eigen::Index>(k)] = w_full[contact_[k]];
  return out;
}

// --- ReducedStepFunctional ---------------------------------------------------

ReducedStepFunctional::ReducedStepFunctional(const ContactReduction& reduction, const StepFunctional& full)
    : reduction_(&reduction), contact_(&full.contact()), affine_(reduction.reduce(full.linear_term())) {}

double ReducedStepFunctional::value(const Eigen::VectorXd& w) const {
  const Eigen::VectorXd sw = reduction_->schur() * w;
  return 0.5 * w.dot(sw) + affine_.linear.dot(w) + affine_.constant +
         contact_->value(reduction_->contact_trace() * w);
}

nsopt::LineFunction ReducedStepFunctional::line(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const {
  const Eigen::MatrixXd& S = reduction_->schur();
  const Eigen::VectorXd sx = S * x;
  const Eigen::VectorXd tx = reduction_->contact_trace() * x;
  auto pts = touched_points(*contact_, tx, reduction_->contact_trace() * d);
  return quadratic_plus_contact(contact_, d.dot(sx) + affine_.linear.dot(d), d.dot(S * d), std::move(pts));
}

nsopt::LineFunction ReducedStepFunctional::coordinate_line(const Eigen::VectorXd& x, Eigen::Index i) const {
  const Eigen::MatrixXd& S = reduction_->schur();
  const Eigen::VectorXd sx = S * x;
  const Eigen::VectorXd tx = reduction_->contact_trace() * x;
  auto pts = touched_points(*contact_, tx, sparse_column(reduction_->contact_trace(), i));
  return quadratic_plus_contact(contact_, sx[i] + affine_.linear[i], S(i, i), std::move(pts));
}

// --- time stepping -------------------------------------------------------------

StepResult solve_step(const DiscreteProblem& problem, int j, const Eigen::VectorXd& d_prev,
                      const Eigen::VectorXd& warm_start, const StepperConfig& cfg) {
  if (warm_start.size() != problem.dofmap().free_count()) {
    throw std::invalid_argument("solve_step: warm start has wrong size");
  }
  const StepFunctional lj = make_Lj(problem, j, d_prev);
  auto powell_cfg = [&](Eigen::Index dim) {
    nsopt::PowellConfig pc = cfg.powell;
    if (pc.restart_every == 0 && cfg.restart_cap > 0) {
      pc.restart_every = static_cast<int>(std::min<Eigen::Index>(dim, cfg.restart_cap));
    }
    return pc;
  };
  StepResult out;
  if (cfg.reduce_interior) {
    const ContactReduction& red = problem.reduction();
    const ReducedStepFunctional reduced(red, lj);
    out.report = nsopt::powell_minimize(reduced, red.gather_contact(warm_start), powell_cfg(reduced.dimension()));
    out.velocity = reduced.lift(out.report.argmin);
  } else {
    out.report = nsopt::powell_minimize(lj, warm_start, powell_cfg(lj.dimension()));
    out.velocity = out.report.argmin;
  }
  out.objective = lj.value(out.velocity);
  out.stationarity_gap = cfg.stationarity_probe > 0
                             ? nsopt::stationarity_gap(lj, out.velocity, cfg.stationarity_probe)
                             : std::numeric_limits<double>::quiet_NaN();
  out.degraded = !out.report.converged;
  return out;
}

StateHistory run(const DiscreteProblem& problem, const StepperConfig& cfg) {
  const TimeGrid& grid = problem.grid();
  const double k = grid.k();
  StateHistory h;
  h.displacements.reserve(static_cast<std::size_t>(grid.N + 1));
  h.velocities.reserve(static_cast<std::size_t>(grid.N));
  h.displacements.push_back(problem.initial_displacement());
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(problem.dofmap().free_count());
  for (int j = 1; j <= grid.N; ++j) {
    StepResult step = solve_step(problem, j, h.displacements.back(), warm, cfg);
    h.degraded = h.degraded || step.degraded;
    h.displacements.push_back(h.displacements.back() + k * step.velocity);
    warm = step.velocity;
    h.velocities.push_back(std::move(step.velocity));
    step.velocity = Eigen::VectorXd();
    h.steps.push_back(std::move(step));
  }
  return h;
}

}  // namespace vcontact
