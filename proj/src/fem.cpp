#include "vcontact/fem.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace vcontact {

namespace {

struct Gauss3 {
  // Gauss-Legendre nodes and weights on [0, 1]
  static constexpr std::array<double, 3> weight{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  static std::array<double, 3> nodes() {
    const double off = std::sqrt(15.0) / 10.0;
    return {0.5 - off, 0.5, 0.5 + off};
  }
};

// Gradients of the barycentric coordinates of a triangle.
struct P1Triangle {
  std::array<int, 3> nodes;
  double area;
  std::array<Eigen::Vector2d, 3> grad;
};

P1Triangle p1_triangle(const Mesh& mesh, std::size_t t) {
  const auto& tri = mesh.triangles()[t];
  const Eigen::Vector2d& p0 = mesh.node(tri[0]);
  const Eigen::Vector2d& p1 = mesh.node(tri[1]);
  const Eigen::Vector2d& p2 = mesh.node(tri[2]);
  const double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p1.y() - p0.y()) * (p2.x() - p0.x());
  P1Triangle out{tri, 0.5 * det, {}};
  out.grad[0] = Eigen::Vector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;
  out.grad[1] = Eigen::Vector2d(p2.y() - p0.y(), p0.x() - p2.x()) / det;
  out.grad[2] = Eigen::Vector2d(p0.y() - p1.y(), p1.x() - p0.x()) / det;
  return out;
}

Eigen::Matrix2d triangle_strain(const P1Triangle& tri, const Eigen::VectorXd& u_full) {
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d ui = u_full.segment<2>(2 * tri.nodes[static_cast<std::size_t>(i)]);
    g += ui * tri.grad[static_cast<std::size_t>(i)].transpose();
  }
  return 0.5 * (g + g.transpose());
}

}  // namespace

void MaterialParams::validate() const {
  if (!(phi > 0 && xi > 0 && eta > 0 && lambda > 0)) {
    throw std::invalid_argument("MaterialParams: phi, xi, eta, lambda must all be > 0");
  }
}

DofMap DofMap::clamped(const Mesh& mesh) {
  DofMap map;
  const auto n_full = 2 * mesh.node_count();
  map.full_to_free_.assign(n_full, -1);
  for (std::size_t node = 0; node < mesh.node_count(); ++node) {
    if (mesh.nodes()[node].x() == 0.0) continue;
    for (int c = 0; c < 2; ++c) {
      const auto full = static_cast<int>(2 * node) + c;
      map.full_to_free_[static_cast<std::size_t>(full)] = static_cast<int>(map.free_to_full_.size());
      map.free_to_full_.push_back(full);
    }
  }
  return map;
}

DofMap DofMap::unconstrained(const Mesh& mesh) {
  DofMap map;
  const auto n_full = static_cast<int>(2 * mesh.node_count());
  for (int i = 0; i < n_full; ++i) {
    map.full_to_free_.push_back(i);
    map.free_to_full_.push_back(i);
  }
  return map;
}

Eigen::VectorXd DofMap::expand(const Eigen::VectorXd& free) const {
  if (free.size() != free_count()) throw std::invalid_argument("DofMap::expand: size mismatch");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(full_size());
  for (Eigen::Index i = 0; i < free.size(); ++i) full[free_to_full_[static_cast<std::size_t>(i)]] = free[i];
  return full;
}

Eigen::VectorXd DofMap::restrict(const Eigen::VectorXd& full) const {
  if (full.size() != full_size()) throw std::invalid_argument("DofMap::restrict: size mismatch");
  Eigen::VectorXd free(free_count());
  for (Eigen::Index i = 0; i < free.size(); ++i) free[i] = full[free_to_full_[static_cast<std::size_t>(i)]];
  return free;
}

LoadData LoadData::constant(const Eigen::Vector2d& f0, const Eigen::Vector2d& fN) {
  LoadData loads;
  loads.f0 = [f0](const Eigen::Vector2d&, double) { return f0; };
  loads.fN = [fN](const Eigen::Vector2d&, double) { return fN; };
  loads.time_independent = true;
  return loads;
}

SparseMatrix assemble_strain_form(const Mesh& mesh, double mu, double lam, const DofMap& dofmap) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.triangle_count() * 36);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const P1Triangle tri = p1_triangle(mesh, t);
    for (std::size_t i = 0; i < 3; ++i) {
      for (int a = 0; a < 2; ++a) {
        const int row = dofmap.free_index(2 * tri.nodes[i] + a);
        if (row < 0) continue;
        for (std::size_t j = 0; j < 3; ++j) {
          for (int b = 0; b < 2; ++b) {
            const int col = dofmap.free_index(2 * tri.nodes[j] + b);
            if (col < 0) continue;
            const Eigen::Vector2d& gi = tri.grad[i];
            const Eigen::Vector2d& gj = tri.grad[j];
            // 2 mu eps(phi_ia):eps(phi_jb) + lam div(phi_ia) div(phi_jb)
            const double shear = (a == b ? gi.dot(gj) : 0.0) + gi[b] * gj[a];
            const double value = tri.area * (mu * shear + lam * gi[a] * gj[b]);
            triplets.emplace_back(row, col, value);
          }
        }
      }
    }
  }
  SparseMatrix m(dofmap.free_count(), dofmap.free_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseMatrix assemble_viscosity(const Mesh& mesh, const MaterialParams& params, const DofMap& dofmap) {
  params.validate();
  return assemble_strain_form(mesh, params.phi, params.xi, dofmap);
}

SparseMatrix assemble_elasticity(const Mesh& mesh, const MaterialParams& params, const DofMap& dofmap) {
  params.validate();
  return assemble_strain_form(mesh, params.eta, params.lambda, dofmap);
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const LoadData& loads, double t, const DofMap& dofmap) {
  Eigen::VectorXd full = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * mesh.node_count()));
  if (loads.f0) {
    // edge-midpoint rule, exact for quadratics
    for (std::size_t k = 0; k < mesh.triangle_count(); ++k) {
      const auto& tri = mesh.triangles()[k];
      const double w = mesh.signed_area(k) / 3.0;
      for (std::size_t e = 0; e < 3; ++e) {
        const auto ia = static_cast<std::size_t>(tri[e]);
        const auto ib = static_cast<std::size_t>(tri[(e + 1) % 3]);
        const Eigen::Vector2d mid = 0.5 * (mesh.nodes()[ia] + mesh.nodes()[ib]);
        const Eigen::Vector2d f = loads.f0(mid, t);
        // both endpoint hats equal 1/2 at the midpoint, the opposite one 0
        full.segment<2>(static_cast<Eigen::Index>(2 * ia)) += 0.5 * w * f;
        full.segment<2>(static_cast<Eigen::Index>(2 * ib)) += 0.5 * w * f;
      }
    }
  }
  if (loads.fN) {
    const auto gp = Gauss3::nodes();
    for (const auto& edge : mesh.boundary_edges()) {
      if (edge.tag != BoundaryTag::Neumann) continue;
      const Eigen::Vector2d& pa = mesh.node(edge.a);
      const Eigen::Vector2d& pb = mesh.node(edge.b);
      const double len = (pb - pa).norm();
      for (std::size_t q = 0; q < 3; ++q) {
        const Eigen::Vector2d x = pa + gp[q] * (pb - pa);
        const Eigen::Vector2d f = loads.fN(x, t) * (Gauss3::weight[q] * len);
        full.segment<2>(2 * edge.a) += (1.0 - gp[q]) * f;
        full.segment<2>(2 * edge.b) += gp[q] * f;
      }
    }
  }
  return dofmap.restrict(full);
}

double v_norm_full(const Mesh& mesh, const Eigen::VectorXd& u_full) {
  if (u_full.size() != static_cast<Eigen::Index>(2 * mesh.node_count())) {
    throw std::invalid_argument("v_norm_full: size mismatch");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const P1Triangle tri = p1_triangle(mesh, t);
    const Eigen::Matrix2d eps = triangle_strain(tri, u_full);
    sum += tri.area * eps.squaredNorm();
  }
  return std::sqrt(sum);
}

double v_norm(const Mesh& mesh, const DofMap& dofmap, const Eigen::VectorXd& u) {
  return v_norm_full(mesh, dofmap.expand(u));
}

ContactQuadrature ContactQuadrature::build(const Mesh& mesh) {
  ContactQuadrature quad;
  const auto gp = Gauss3::nodes();
  for (const auto& edge : mesh.boundary_edges()) {
    if (edge.tag != BoundaryTag::Contact) continue;
    const Eigen::Vector2d& pa = mesh.node(edge.a);
    const Eigen::Vector2d& pb = mesh.node(edge.b);
    const double len = (pb - pa).norm();
    for (std::size_t q = 0; q < 3; ++q) {
      quad.points_.push_back(
          {pa + gp[q] * (pb - pa), Gauss3::weight[q] * len, edge.a, edge.b, 1.0 - gp[q], gp[q]});
    }
  }
  return quad;
}

SparseMatrix ContactQuadrature::trace_matrix(const DofMap& dofmap) const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t q = 0; q < points_.size(); ++q) {
    const auto& p = points_[q];
    for (int c = 0; c < 2; ++c) {
      const auto row = static_cast<int>(2 * q) + c;
      const int fa = dofmap.free_index(2 * p.node_a + c);
      const int fb = dofmap.free_index(2 * p.node_b + c);
      if (fa >= 0) triplets.emplace_back(row, fa, p.shape_a);
      if (fb >= 0) triplets.emplace_back(row, fb, p.shape_b);
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(2 * points_.size()), dofmap.free_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

std::vector<TraceSample> contact_trace(const ContactQuadrature& quad, const DofMap& dofmap,
                                       const Eigen::VectorXd& u) {
  if (u.size() != dofmap.free_count()) throw std::invalid_argument("contact_trace: size mismatch");
  auto nodal = [&](int node) {
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    for (int c = 0; c < 2; ++c) {
      const int f = dofmap.free_index(2 * node + c);
      if (f >= 0) v[c] = u[f];
    }
    return v;
  };
  std::vector<TraceSample> out;
  out.reserve(quad.size());
  for (const auto& p : quad.points()) {
    const Eigen::Vector2d value = p.shape_a * nodal(p.node_a) + p.shape_b * nodal(p.node_b);
    out.push_back({p.x, p.weight, value, normal_component(value), tangential_component(value)});
  }
  return out;
}

void write_coo(std::ostream& os, const SparseMatrix& m) {
  os.precision(17);
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace vcontact
