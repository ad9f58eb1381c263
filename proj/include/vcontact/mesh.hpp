#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vcontact {

enum class BoundaryTag { Dirichlet, Neumann, Contact };

const char* to_string(BoundaryTag tag);

struct BoundaryEdge {
  int a;
  int b;
  BoundaryTag tag;
};

/// Uniform triangulation of the unit square.
///
/// Nodes are numbered row-major by (y, x): node (ix, iy) has index
/// iy * (n + 1) + ix. Every cell is split along its bottom-left to top-right
/// diagonal, so the meshes for n and m * n are nested. Boundary edges are
/// oriented with the domain on their left:
///   bottom  y = 0  -> Contact
///   left    x = 0  -> Dirichlet
///   top, right     -> Neumann
class Mesh {
 public:
  static Mesh build_uniform(int n_per_side);

  int n_per_side() const { return n_; }
  double h() const { return 1.0 / n_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t triangle_count() const { return triangles_.size(); }

  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return edges_; }

  const Eigen::Vector2d& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  int node_index(int ix, int iy) const { return iy * (n_ + 1) + ix; }

  /// Signed area of triangle t (positive for counterclockwise ordering).
  double signed_area(std::size_t t) const;

  std::size_t count_edges(BoundaryTag tag) const;

 private:
  Mesh() = default;

  int n_ = 0;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<BoundaryEdge> edges_;
};

/// Exact P1 embedding of a coarse nodal field (2 interleaved components per
/// node) into a nested fine mesh. Throws std::invalid_argument when the fine
/// resolution is not an integer multiple of the coarse one.
Eigen::VectorXd prolongate(const Mesh& coarse, const Mesh& fine,
                           const Eigen::VectorXd& dof_vector);

/// Legacy ASCII VTK (version 2.0) unstructured grid of triangles. `point_data`
/// holds optional 2-component nodal vector fields written as 3D vectors.
struct VtkField {
  std::string name;
  Eigen::VectorXd values;  // 2 * node_count, interleaved
};

void write_vtk(std::ostream& os, const Mesh& mesh, const std::string& title,
               const std::vector<VtkField>& point_data = {},
               const Eigen::VectorXd* displacement = nullptr);

void write_vtk_file(const std::string& path, const Mesh& mesh,
                    const std::string& title,
                    const std::vector<VtkField>& point_data = {},
                    const Eigen::VectorXd* displacement = nullptr);

}  // namespace vcontact
