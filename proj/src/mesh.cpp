#include "vcontact/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace vcontact {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Dirichlet:
      return "Dirichlet";
    case BoundaryTag::Neumann:
      return "Neumann";
    case BoundaryTag::Contact:
      return "Contact";
  }
  return "?";
}

Mesh Mesh::build_uniform(int n_per_side) {
  if (n_per_side < 1) {
    throw std::invalid_argument("Mesh::build_uniform: n_per_side must be >= 1, got " +
                                std::to_string(n_per_side));
  }
  Mesh m;
  m.n_ = n_per_side;
  const int n = n_per_side;
  m.nodes_.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int iy = 0; iy <= n; ++iy) {
    for (int ix = 0; ix <= n; ++ix) {
      // i / n rather than i * h keeps the nodes of nested meshes bitwise equal
      m.nodes_.emplace_back(static_cast<double>(ix) / n, static_cast<double>(iy) / n);
    }
  }

  m.triangles_.reserve(static_cast<std::size_t>(2 * n * n));
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int a = m.node_index(ix, iy);
      const int b = m.node_index(ix + 1, iy);
      const int c = m.node_index(ix + 1, iy + 1);
      const int d = m.node_index(ix, iy + 1);
      m.triangles_.push_back({a, b, c});
      m.triangles_.push_back({a, c, d});
    }
  }

  m.edges_.reserve(static_cast<std::size_t>(4 * n));
  for (int ix = 0; ix < n; ++ix) {
    m.edges_.push_back({m.node_index(ix, 0), m.node_index(ix + 1, 0), BoundaryTag::Contact});
  }
  for (int iy = 0; iy < n; ++iy) {
    m.edges_.push_back({m.node_index(n, iy), m.node_index(n, iy + 1), BoundaryTag::Neumann});
  }
  for (int ix = n; ix > 0; --ix) {
    m.edges_.push_back({m.node_index(ix, n), m.node_index(ix - 1, n), BoundaryTag::Neumann});
  }
  for (int iy = n; iy > 0; --iy) {
    m.edges_.push_back({m.node_index(0, iy), m.node_index(0, iy - 1), BoundaryTag::Dirichlet});
  }
  return m;
}

double Mesh::signed_area(std::size_t t) const {
  const auto& tri = triangles_[t];
  const Eigen::Vector2d e1 = node(tri[1]) - node(tri[0]);
  const Eigen::Vector2d e2 = node(tri[2]) - node(tri[0]);
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

std::size_t Mesh::count_edges(BoundaryTag tag) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [tag](const BoundaryEdge& e) { return e.tag == tag; }));
}

Eigen::VectorXd prolongate(const Mesh& coarse, const Mesh& fine, const Eigen::VectorXd& dof_vector) {
  const int nc = coarse.n_per_side();
  const int nf = fine.n_per_side();
  if (nf % nc != 0) {
    throw std::invalid_argument("prolongate: fine resolution " + std::to_string(nf) +
                                " is not a multiple of coarse resolution " + std::to_string(nc));
  }
  if (dof_vector.size() != static_cast<Eigen::Index>(2 * coarse.node_count())) {
    throw std::invalid_argument("prolongate: dof vector must have 2 entries per coarse node");
  }
  const int r = nf / nc;
  Eigen::VectorXd out(static_cast<Eigen::Index>(2 * fine.node_count()));
  auto coarse_value = [&](int ix, int iy, int comp) {
    return dof_vector[2 * coarse.node_index(ix, iy) + comp];
  };
  for (int jy = 0; jy <= nf; ++jy) {
    for (int jx = 0; jx <= nf; ++jx) {
      const int cx = std::min(jx / r, nc - 1);
      const int cy = std::min(jy / r, nc - 1);
      const double s = static_cast<double>(jx - cx * r) / r;
      const double t = static_cast<double>(jy - cy * r) / r;
      const int fi = fine.node_index(jx, jy);
      for (int comp = 0; comp < 2; ++comp) {
        const double a = coarse_value(cx, cy, comp);
        const double b = coarse_value(cx + 1, cy, comp);
        const double c = coarse_value(cx + 1, cy + 1, comp);
        const double d = coarse_value(cx, cy + 1, comp);
        // lower triangle (a, b, c) when s >= t, upper (a, c, d) otherwise
        out[2 * fi + comp] = s >= t ? (1 - s) * a + (s - t) * b + t * c : (1 - t) * a + (t - s) * d + s * c;
      }
    }
  }
  return out;
}

void write_vtk(std::ostream& os, const Mesh& mesh, const std::string& title,
               const std::vector<VtkField>& point_data, const Eigen::VectorXd* displacement) {
  const auto np = mesh.node_count();
  const auto nt = mesh.triangle_count();
  os << "# vtk DataFile Version 2.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(12);
  os << "POINTS " << np << " double\n";
  for (std::size_t i = 0; i < np; ++i) {
    Eigen::Vector2d p = mesh.nodes()[i];
    if (displacement != nullptr) {
      p += displacement->segment<2>(static_cast<Eigen::Index>(2 * i));
    }
    os << p.x() << ' ' << p.y() << " 0\n";
  }
  os << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& tri : mesh.triangles()) {
    os << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  os << "CELL_TYPES " << nt << '\n';
  for (std::size_t t = 0; t < nt; ++t) os << "5\n";
  if (!point_data.empty()) {
    os << "POINT_DATA " << np << '\n';
    for (const auto& field : point_data) {
      if (field.values.size() != static_cast<Eigen::Index>(2 * np)) {
        throw std::invalid_argument("write_vtk: field '" + field.name + "' has wrong size");
      }
      os << "VECTORS " << field.name << " double\n";
      for (std::size_t i = 0; i < np; ++i) {
        os << field.values[static_cast<Eigen::Index>(2 * i)] << ' '
           << field.values[static_cast<Eigen::Index>(2 * i + 1)] << " 0\n";
      }
    }
  }
}

void write_vtk_file(const std::string& path, const Mesh& mesh, const std::string& title,
                    const std::vector<VtkField>& point_data, const Eigen::VectorXd* displacement) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_vtk(os, mesh, title, point_data, displacement);
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace vcontact
