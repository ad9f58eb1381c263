#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include "vcontact/contact_laws.hpp"
#include "vcontact/fem.hpp"
#include "vcontact/mesh.hpp"
#include "vcontact/nsopt.hpp"

namespace vcontact {

/// Uniform time grid t_j = j * k, k = T / N.
struct TimeGrid {
  double T = 1.0;
  int N = 1;

  static TimeGrid make(double T, int N);
  double k() const { return T / N; }
  double t(int j) const { return j * k(); }
};

class ContactReduction;

/// Everything the fully discrete scheme needs: assembled operators, loads at
/// every time node, contact law and the initial displacement.
class DiscreteProblem {
 public:
  /// `u0h` defaults to the zero displacement.
  static DiscreteProblem build(const Mesh& mesh, const MaterialParams& params, const LoadData& loads,
                               const ContactLaw& law, const TimeGrid& grid,
                               Eigen::VectorXd u0h = {});

  const Mesh& mesh() const { return mesh_; }
  const DofMap& dofmap() const { return dofmap_; }
  const ContactQuadrature& quadrature() const { return quad_; }
  const SparseMatrix& viscosity() const { return A_; }
  const SparseMatrix& elasticity() const { return B_; }
  /// Free DOFs -> interleaved contact trace values.
  const SparseMatrix& trace() const { return trace_; }
  const ContactLaw& law() const { return law_; }
  const TimeGrid& grid() const { return grid_; }
  const Eigen::VectorXd& initial_displacement() const { return u0h_; }
  const MaterialParams& params() const { return params_; }

  /// Load vector f_j = f(t_j), 0 <= j <= N.
  const Eigen::VectorXd& load(int j) const;
  /// Number of distinct load vectors assembled (1 for time-independent data).
  std::size_t assembled_load_count() const { return loads_.size(); }

  /// Elimination of the non-contact DOFs.
  const ContactReduction& reduction() const;

  /// Replaces the contact law, keeping the assembled operators.
  DiscreteProblem with_law(const ContactLaw& law) const;

 private:
  DiscreteProblem(const Mesh& mesh) : mesh_(mesh) {}

  Mesh mesh_;
  DofMap dofmap_;
  ContactQuadrature quad_;
  MaterialParams params_;
  SparseMatrix A_;
  SparseMatrix B_;
  SparseMatrix trace_;
  std::vector<Eigen::VectorXd> loads_;
  ContactLaw law_;
  TimeGrid grid_;
  Eigen::VectorXd u0h_;
  std::shared_ptr<const ContactReduction> reduction_;
};

/// Contact coefficients frozen at the previous displacement:
/// J(w) = sum_q normal_q * w_nu(x_q) + tangential_q * j_tau(w_tau(x_q)),
/// with the quadrature weight folded into both coefficients.
struct FrozenContact {
  Eigen::VectorXd normal;
  Eigen::VectorXd tangential;
  FrictionPotential j_tau;

  static FrozenContact freeze(const DiscreteProblem& problem, const Eigen::VectorXd& d_prev);
  /// `trace` holds interleaved trace values (2 per quadrature point).
  double value(const Eigen::VectorXd& trace) const;
  double point_value(Eigen::Index q, double tx, double ty) const;
};

/// L_j(w) = 1/2 <A w, w> + <B d_prev - f_j, w> + J(gamma d_prev, gamma w)
/// over the free DOFs.
class StepFunctional final : public nsopt::Objective {
 public:
  StepFunctional(const DiscreteProblem& problem, int j, const Eigen::VectorXd& d_prev);

  Eigen::Index dimension() const override { return linear_.size(); }
  double value(const Eigen::VectorXd& w) const override;
  nsopt::LineFunction line(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const override;
  nsopt::LineFunction coordinate_line(const Eigen::VectorXd& x, Eigen::Index i) const override;
  nsopt::CoordinateLines coordinate_lines(const Eigen::VectorXd& x) const override;

  /// B d_prev - f_j.
  const Eigen::VectorXd& linear_term() const { return linear_; }
  const FrozenContact& contact() const { return contact_; }
  /// Gradient of the quadratic and linear part.
  Eigen::VectorXd smooth_gradient(const Eigen::VectorXd& w) const;

 private:
  const DiscreteProblem* problem_;
  Eigen::VectorXd linear_;
  FrozenContact contact_;
};

StepFunctional make_Lj(const DiscreteProblem& problem, int j, const Eigen::VectorXd& d_prev);

/// Exact elimination of the free DOFs off Gamma_C. For fixed contact values
/// w_C the functional is a strictly convex quadratic in the remaining DOFs
/// w_I; minimizing it in closed form leaves
///   1/2 w_C' S w_C + c~' w_C + const + J(w_C),
/// S = A_CC - A_CI A_II^-1 A_IC, whose minimizer lifts to the minimizer of
/// the full functional.
class ContactReduction {
 public:
  explicit ContactReduction(const DiscreteProblem& problem);

  const std::vector<int>& contact_dofs() const { return contact_; }
  const std::vector<int>& interior_dofs() const { return interior_; }
  const Eigen::MatrixXd& schur() const { return schur_; }
  /// Contact DOFs -> interleaved trace values.
  const SparseMatrix& contact_trace() const { return trace_c_; }

  struct Affine {
    Eigen::VectorXd linear;   // c~
    double constant;          // -1/2 c_I' A_II^-1 c_I
    Eigen::VectorXd shift;    // A_II^-1 c_I
  };
  Affine reduce(const Eigen::VectorXd& linear_full) const;
  Eigen::VectorXd lift(const Eigen::VectorXd& w_contact, const Affine& affine) const;
  Eigen::VectorXd gather_contact(const Eigen::VectorXd& w_full) const;

 private:
  std::vector<int> contact_;
  std::vector<int> interior_;
  SparseMatrix a_ci_;  // A restricted to rows C, columns I
  Eigen::SimplicialLLT<SparseMatrix> a_ii_;
  Eigen::MatrixXd coupling_;  // A_II^-1 A_IC
  Eigen::MatrixXd schur_;
  SparseMatrix trace_c_;
};

/// The reduced functional over the contact DOFs.
class ReducedStepFunctional final : public nsopt::Objective {
 public:
  ReducedStepFunctional(const ContactReduction& reduction, const StepFunctional& full);

  Eigen::Index dimension() const override { return affine_.linear.size(); }
  double value(const Eigen::VectorXd& w) const override;
  nsopt::LineFunction line(const Eigen::VectorXd& x, const Eigen::VectorXd& d) const override;
  nsopt::LineFunction coordinate_line(const Eigen::VectorXd& x, Eigen::Index i) const override;

  Eigen::VectorXd lift(const Eigen::VectorXd& w_contact) const { return reduction_->lift(w_contact, affine_); }

 private:
  const ContactReduction* reduction_;
  const FrozenContact* contact_;
  ContactReduction::Affine affine_;
};

struct StepperConfig {
  nsopt::PowellConfig powell;
  /// Minimize over the contact DOFs with the rest eliminated exactly; when
  /// false, Powell runs over every free DOF.
  bool reduce_interior = true;
  /// Restart cadence used when powell.restart_every is 0: min(dimension, cap).
  int restart_cap = 32;
  /// Probe length of the post-hoc stationarity check; <= 0 disables it.
  double stationarity_probe = 1e-5;
};

struct StepResult {
  Eigen::VectorXd velocity;
  nsopt::MinimizeReport report;
  double objective = 0.0;          // L_j(velocity)
  double stationarity_gap = 0.0;   // NaN when the check is disabled
  bool degraded = false;           // optimizer hit its iteration limit
};

StepResult solve_step(const DiscreteProblem& problem, int j, const Eigen::VectorXd& d_prev,
                      const Eigen::VectorXd& warm_start, const StepperConfig& cfg = {});

struct StateHistory {
  std::vector<Eigen::VectorXd> velocities;     // v_1 .. v_N (index 0 is v_1)
  std::vector<Eigen::VectorXd> displacements;  // d_0 .. d_N
  std::vector<StepResult> steps;               // velocity fields moved out
  bool degraded = false;

  const Eigen::VectorXd& final_velocity() const { return velocities.back(); }
  const Eigen::VectorXd& final_displacement() const { return displacements.back(); }
};

StateHistory run(const DiscreteProblem& problem, const StepperConfig& cfg = {});

}  // namespace vcontact
