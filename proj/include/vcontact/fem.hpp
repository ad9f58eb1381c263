#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "vcontact/mesh.hpp"

namespace vcontact {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Kelvin-Voigt coefficients. The viscosity pair (phi, xi) defines
/// A(tau) = 2 phi tau + xi tr(tau) I, the Lame pair (eta, lambda) defines
/// B(tau) = 2 eta tau + lambda tr(tau) I.
struct MaterialParams {
  double phi = 2.0;
  double xi = 2.0;
  double eta = 4.0;
  double lambda = 4.0;

  /// Throws std::invalid_argument unless every coefficient is > 0.
  void validate() const;
};

/// Maps full nodal DOFs (2 per node, interleaved x/y) to the free DOFs that
/// remain after eliminating clamped nodes on {0} x [0, 1].
class DofMap {
 public:
  static DofMap clamped(const Mesh& mesh);
  /// Every DOF free; used for checks on the unconstrained operators.
  static DofMap unconstrained(const Mesh& mesh);

  Eigen::Index free_count() const { return static_cast<Eigen::Index>(free_to_full_.size()); }
  Eigen::Index full_size() const { return static_cast<Eigen::Index>(full_to_free_.size()); }
  const std::vector<int>& free_dofs() const { return free_to_full_; }
  /// -1 for constrained DOFs.
  int free_index(int full_dof) const { return full_to_free_[static_cast<std::size_t>(full_dof)]; }

  Eigen::VectorXd expand(const Eigen::VectorXd& free) const;
  Eigen::VectorXd restrict(const Eigen::VectorXd& full) const;

 private:
  std::vector<int> free_to_full_;
  std::vector<int> full_to_free_;
};

/// Body force f0(x, t) and Neumann traction fN(x, t).
struct LoadData {
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> f0;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)> fN;
  bool time_independent = false;

  static LoadData constant(const Eigen::Vector2d& f0, const Eigen::Vector2d& fN);
};

/// Stiffness of the bilinear form (2 mu eps(u) : eps(w) + lam div u div w)
/// over the free DOFs of `dofmap`.
SparseMatrix assemble_strain_form(const Mesh& mesh, double mu, double lam, const DofMap& dofmap);

SparseMatrix assemble_viscosity(const Mesh& mesh, const MaterialParams& params, const DofMap& dofmap);
SparseMatrix assemble_elasticity(const Mesh& mesh, const MaterialParams& params, const DofMap& dofmap);

/// F_i = int_Omega f0(t) . phi_i dx + int_{Gamma_N} fN(t) . phi_i da.
Eigen::VectorXd assemble_load(const Mesh& mesh, const LoadData& loads, double t, const DofMap& dofmap);

/// sqrt(int_Omega eps(u) : eps(u) dx) for a free-DOF vector.
double v_norm(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& u);

/// Same, for a full nodal vector (2 * node_count entries).
double v_norm_full(const Mesh& mesh, const Eigen::VectorXd& u_full);

/// Outward unit normal on the contact boundary y = 0.
inline const Eigen::Vector2d kContactNormal{0.0, -1.0};

inline double normal_component(const Eigen::Vector2d& u) { return u.dot(kContactNormal); }
inline Eigen::Vector2d tangential_component(const Eigen::Vector2d& u) {
  return u - normal_component(u) * kContactNormal;
}

/// 3-point Gauss-Legendre rule on every contact edge, ordered by x.
class ContactQuadrature {
 public:
  struct Point {
    Eigen::Vector2d x;
    double weight;
    int node_a;
    int node_b;
    double shape_a;
    double shape_b;
  };

  static ContactQuadrature build(const Mesh& mesh);

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  /// Sparse map from free DOFs to interleaved trace values (2 per point).
  SparseMatrix trace_matrix(const DofMap& dofmap) const;

 private:
  std::vector<Point> points_;
};

struct TraceSample {
  Eigen::Vector2d x;
  double weight;
  Eigen::Vector2d value;
  double u_nu;
  Eigen::Vector2d u_tau;
};

/// Boundary values of a free-DOF field on Gamma_C at every quadrature point.
/// Constrained DOFs contribute zero.
std::vector<TraceSample> contact_trace(const ContactQuadrature& quad, const DofMap& dofmap,
                                       const Eigen::VectorXd& u);

/// Coordinate-format dump (row col value, 0-based, upper and lower parts).
void write_coo(std::ostream& os, const SparseMatrix& m);

}  // namespace vcontact
