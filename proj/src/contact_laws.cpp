#include "vcontact/contact_laws.hpp"

#include <stdexcept>

namespace vcontact {

ContactLaw ContactLaw::frictionless_free() {
  return {BoundFunction::zero(), BoundFunction::zero(), {FrictionKind::Norm}};
}

double eval_j(const ContactLaw& law, const Eigen::Vector2d& x, const Eigen::Vector2d& eta,
              const Eigen::Vector2d& xi) {
  const double eta_nu = normal_component(eta);
  const double gn = law.g_nu(x, eta_nu);
  const double gt = law.g_tau(x, eta_nu);
  double value = gn * normal_component(xi);
  if (gt != 0.0) value += gt * law.j_tau(tangential_component(xi));
  return value;
}

double eval_J(const ContactLaw& law, const std::vector<TraceSample>& prior,
              const std::vector<TraceSample>& velocity) {
  if (prior.size() != velocity.size()) {
    throw std::invalid_argument("eval_J: trace sample counts differ (" + std::to_string(prior.size()) +
                                " vs " + std::to_string(velocity.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < prior.size(); ++q) {
    const auto& p = prior[q];
    const auto& v = velocity[q];
    if (p.x != v.x || p.weight != v.weight) {
      throw std::invalid_argument("eval_J: trace samples come from different quadrature layouts");
    }
    sum += p.weight * eval_j(law, p.x, p.value, v.value);
  }
  return sum;
}

double greased_g_tau(const Eigen::Vector2d& x, double eta_nu) {
  return BoundFunction{30.0, 0.1, 0.5}(x, eta_nu);
}

ContactLaw scenario_law(const std::string& name) {
  const BoundFunction base_bound{30.0, 0.1};
  if (name == "base" || name == "reversed_f0") {
    return {base_bound, base_bound, {FrictionKind::ExpNorm}};
  }
  if (name == "stiff_gnu") {
    return {BoundFunction{200.0, 0.1}, base_bound, {FrictionKind::ExpNorm}};
  }
  if (name == "greased") {
    return {base_bound, BoundFunction{30.0, 0.1, 0.5}, {FrictionKind::ExpNorm}};
  }
  if (name == "convergence") {
    return {BoundFunction{60.0, 0.1}, BoundFunction{120.0, 0.1}, {FrictionKind::Norm}};
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

}  // namespace vcontact
