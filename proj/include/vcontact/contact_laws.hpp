#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vcontact/fem.hpp"

namespace vcontact {

/// Piecewise-linear bound g(x, eta): 0 for eta < 0, slope * eta on
/// [0, eta_cap), slope * eta_cap beyond. The bound vanishes identically for
/// boundary points with x1 >= zero_from_x (a lubricated stretch of Gamma_C).
struct BoundFunction {
  double slope = 0.0;
  double eta_cap = 0.1;
  double zero_from_x = std::numeric_limits<double>::infinity();

  double operator()(const Eigen::Vector2d& x, double eta) const {
    if (x.x() >= zero_from_x || eta < 0.0) return 0.0;
    return eta < eta_cap ? slope * eta : slope * eta_cap;
  }
  double upper_bound() const { return slope * eta_cap; }
  static BoundFunction zero() { return {0.0, 0.1}; }
};

enum class FrictionKind {
  ExpNorm,  // -0.3 exp(-|xi|) + 0.7 |xi|
  Norm,     // |xi|
};

struct FrictionPotential {
  FrictionKind kind = FrictionKind::ExpNorm;

  double operator()(const Eigen::Vector2d& xi_tau) const { return value(xi_tau.norm()); }
  /// Value as a function of |xi_tau|.
  double value(double r) const {
    return kind == FrictionKind::ExpNorm ? -0.3 * std::exp(-r) + 0.7 * r : r;
  }
  /// Global Lipschitz constant.
  static constexpr double lipschitz() { return 1.0; }
};

/// Superpotential j(x, eta, xi) = g_nu(x, eta_nu) xi_nu + g_tau(x, eta_nu) j_tau(xi_tau).
struct ContactLaw {
  BoundFunction g_nu;
  BoundFunction g_tau;
  FrictionPotential j_tau;

  static ContactLaw frictionless_free();  // g_nu = g_tau = 0
};

double eval_j(const ContactLaw& law, const Eigen::Vector2d& x, const Eigen::Vector2d& eta,
              const Eigen::Vector2d& xi);

/// Quadrature approximation of J(w, v) = int_{Gamma_C} j(x, w, v) da.
/// Throws std::invalid_argument when the two sample sets do not share a
/// quadrature layout.
double eval_J(const ContactLaw& law, const std::vector<TraceSample>& prior,
              const std::vector<TraceSample>& velocity);

/// Friction bound of the lubricated scenario: clamp-ramp(30, 0.1) on
/// x1 < 0.5, zero on [0.5, 1].
double greased_g_tau(const Eigen::Vector2d& x, double eta_nu);

/// Contact laws of the named scenarios: base, stiff_gnu, reversed_f0,
/// greased, convergence. Throws std::invalid_argument for other names.
ContactLaw scenario_law(const std::string& name);

}  // namespace vcontact
