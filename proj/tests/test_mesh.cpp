#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "vcontact/fem.hpp"
#include "vcontact/mesh.hpp"

using namespace vcontact;

namespace {

Eigen::VectorXd nodal_field(const Mesh& m, double (*fx)(double, double), double (*fy)(double, double)) {
  Eigen::VectorXd u(2 * m.node_count());
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const auto& p = m.nodes()[i];
    u[2 * i] = fx(p.x(), p.y());
    u[2 * i + 1] = fy(p.x(), p.y());
  }
  return u;
}

// Hat function of coarse node `c` evaluated at point p, by brute force over
// the coarse triangles (barycentric coordinates).
double coarse_hat(const Mesh& coarse, int c, const Eigen::Vector2d& p) {
  for (const auto& t : coarse.triangles()) {
    const Eigen::Vector2d a = coarse.node(t[0]), b = coarse.node(t[1]), d = coarse.node(t[2]);
    Eigen::Matrix2d M;
    M << b - a, d - a;
    const Eigen::Vector2d l = M.inverse() * (p - a);
    const double l0 = 1 - l[0] - l[1];
    if (l0 >= -1e-12 && l[0] >= -1e-12 && l[1] >= -1e-12) {
      if (t[0] == c) return l0;
      if (t[1] == c) return l[0];
      if (t[2] == c) return l[1];
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace

TEST_CASE("counts on small meshes") {
  const Mesh m1 = Mesh::build_uniform(1);
  CHECK(m1.node_count() == 4);
  CHECK(m1.triangle_count() == 2);
  CHECK(m1.count_edges(BoundaryTag::Contact) == 1);
  CHECK(m1.count_edges(BoundaryTag::Dirichlet) == 1);
  CHECK(m1.count_edges(BoundaryTag::Neumann) == 2);

  const Mesh m2 = Mesh::build_uniform(2);
  CHECK(m2.node_count() == 9);
  CHECK(m2.triangle_count() == 8);
  CHECK(m2.count_edges(BoundaryTag::Contact) == 2);

  const Mesh m32 = Mesh::build_uniform(32);
  CHECK(m32.node_count() == 1089);
  CHECK(m32.triangle_count() == 2048);
  for (std::size_t t = 0; t < m32.triangle_count(); ++t) {
    REQUIRE(m32.signed_area(t) == doctest::Approx(0.5 / (32.0 * 32.0)).epsilon(1e-14));
  }
}

TEST_CASE("invalid resolution is rejected") {
  CHECK_THROWS_AS(Mesh::build_uniform(0), std::invalid_argument);
  CHECK_THROWS_AS(Mesh::build_uniform(-3), std::invalid_argument);
}

TEST_CASE("boundary tags cover the sides with the domain on the left") {
  for (int n : {1, 3, 8}) {
    const Mesh m = Mesh::build_uniform(n);
    CHECK(m.count_edges(BoundaryTag::Contact) == static_cast<std::size_t>(n));
    CHECK(m.count_edges(BoundaryTag::Dirichlet) == static_cast<std::size_t>(n));
    CHECK(m.count_edges(BoundaryTag::Neumann) == static_cast<std::size_t>(2 * n));
    double contact_len = 0, dirichlet_len = 0, neumann_len = 0;
    const Eigen::Vector2d centre(0.5, 0.5);
    for (const auto& e : m.boundary_edges()) {
      const Eigen::Vector2d a = m.node(e.a), b = m.node(e.b);
      const Eigen::Vector2d t = b - a;
      const Eigen::Vector2d mid = 0.5 * (a + b);
      // Left normal of the tangent points inwards.
      const Eigen::Vector2d left(-t.y(), t.x());
      CHECK(left.dot(centre - mid) > 0);
      switch (e.tag) {
        case BoundaryTag::Contact:
          CHECK(a.y() == 0.0);
          CHECK(b.y() == 0.0);
          contact_len += t.norm();
          break;
        case BoundaryTag::Dirichlet:
          CHECK(a.x() == 0.0);
          CHECK(b.x() == 0.0);
          dirichlet_len += t.norm();
          break;
        case BoundaryTag::Neumann:
          CHECK(((a.y() == 1.0 && b.y() == 1.0) || (a.x() == 1.0 && b.x() == 1.0)));
          neumann_len += t.norm();
          break;
      }
    }
    CHECK(contact_len == doctest::Approx(1.0));
    CHECK(dirichlet_len == doctest::Approx(1.0));
    CHECK(neumann_len == doctest::Approx(2.0));
  }
  CHECK(std::string(to_string(BoundaryTag::Contact)) == "Contact");
}

TEST_CASE("triangles are counterclockwise on every resolution") {
  for (int n : {1, 2, 5, 16}) {
    const Mesh m = Mesh::build_uniform(n);
    for (std::size_t t = 0; t < m.triangle_count(); ++t) REQUIRE(m.signed_area(t) > 0);
  }
}

TEST_CASE("node ordering is row-major by (y, x)") {
  const Mesh m = Mesh::build_uniform(4);
  CHECK(m.node_index(3, 2) == 2 * 5 + 3);
  CHECK(m.node(m.node_index(3, 2)).x() == doctest::Approx(0.75));
  CHECK(m.node(m.node_index(3, 2)).y() == doctest::Approx(0.5));
}

TEST_CASE("prolongation reproduces constants and linears") {
  const Mesh c = Mesh::build_uniform(2);
  const Mesh f4 = Mesh::build_uniform(4);
  const Mesh f8 = Mesh::build_uniform(8);

  const auto one = nodal_field(c, [](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  const auto p1 = prolongate(c, f4, one);
  for (std::size_t i = 0; i < f4.node_count(); ++i) {
    CHECK(p1[2 * i] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p1[2 * i + 1] == 0.0);
  }

  const auto lin = nodal_field(c, [](double x, double) { return x; }, [](double, double y) { return y; });
  const auto p2 = prolongate(c, f8, lin);
  for (std::size_t i = 0; i < f8.node_count(); ++i) {
    CHECK(p2[2 * i] == doctest::Approx(f8.nodes()[i].x()).epsilon(1e-15));
    CHECK(p2[2 * i + 1] == doctest::Approx(f8.nodes()[i].y()).epsilon(1e-15));
  }
}

TEST_CASE("prolongated hat functions match direct evaluation") {
  const Mesh c = Mesh::build_uniform(2);
  const Mesh f = Mesh::build_uniform(4);
  for (int node = 0; node < static_cast<int>(c.node_count()); ++node) {
    Eigen::VectorXd hat = Eigen::VectorXd::Zero(2 * c.node_count());
    hat[2 * node] = 1.0;
    const auto p = prolongate(c, f, hat);
    for (std::size_t i = 0; i < f.node_count(); ++i) {
      REQUIRE(p[2 * i] == doctest::Approx(coarse_hat(c, node, f.nodes()[i])).epsilon(1e-14));
      REQUIRE(p[2 * i + 1] == 0.0);
    }
  }
  // The midpoint of a coarse edge carries the mean of its endpoint values.
  Eigen::VectorXd hat = Eigen::VectorXd::Zero(2 * c.node_count());
  hat[2 * c.node_index(1, 1)] = 1.0;
  const auto p = prolongate(c, f, hat);
  CHECK(p[2 * f.node_index(3, 2)] == doctest::Approx(0.5));  // between (1,1) and (2,1)
  CHECK(p[2 * f.node_index(3, 3)] == doctest::Approx(0.5));  // diagonal (1,1)-(2,2)
  CHECK(p[2 * f.node_index(1, 3)] == 0.0);                   // edge (0,1)-(1,2) is not an edge of the split
}

TEST_CASE("V-norm is preserved by prolongation") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (auto [nc, nf] : {std::pair{2, 4}, std::pair{2, 8}, std::pair{3, 12}, std::pair{8, 16}}) {
    const Mesh c = Mesh::build_uniform(nc);
    const Mesh f = Mesh::build_uniform(nf);
    Eigen::VectorXd w(2 * c.node_count());
    for (auto& v : w) v = U(rng);
    const double coarse = v_norm_full(c, w);
    const double fine = v_norm_full(f, prolongate(c, f, w));
    CHECK(std::abs(coarse - fine) <= 1e-12 * coarse);
  }
}

TEST_CASE("prolongation rejects non-nested meshes and bad sizes") {
  const Mesh c = Mesh::build_uniform(3);
  const Mesh f = Mesh::build_uniform(4);
  CHECK_THROWS_AS(prolongate(c, f, Eigen::VectorXd::Zero(2 * c.node_count())), std::invalid_argument);
  const Mesh f6 = Mesh::build_uniform(6);
  CHECK_THROWS_AS(prolongate(c, f6, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(prolongate(f6, c, Eigen::VectorXd::Zero(2 * f6.node_count())), std::invalid_argument);
}

TEST_CASE("legacy VTK output") {
  const Mesh m = Mesh::build_uniform(1);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(8);
  u[2] = 0.5;
  std::ostringstream os;
  write_vtk(os, m, "unit cell", {{"displacement", u}}, &u);
  const std::string s = os.str();
  CHECK(s.rfind("# vtk DataFile Version 2.0\nunit cell\nASCII\nDATASET UNSTRUCTURED_GRID\n", 0) == 0);
  CHECK(s.find("POINTS 4 double") != std::string::npos);
  CHECK(s.find("1.5 0 0") != std::string::npos);  // node 1 moved by u
  CHECK(s.find("CELLS 2 8") != std::string::npos);
  CHECK(s.find("CELL_TYPES 2\n5\n5\n") != std::string::npos);
  CHECK(s.find("POINT_DATA 4") != std::string::npos);
  CHECK(s.find("VECTORS displacement double") != std::string::npos);

  std::ostringstream again;
  write_vtk(again, m, "unit cell", {{"displacement", u}}, &u);
  CHECK(again.str() == s);

  CHECK_THROWS(write_vtk(os, m, "bad", {{"short", Eigen::VectorXd::Zero(3)}}));
  CHECK_THROWS(write_vtk_file("/nonexistent-dir/x.vtk", m, "t"));
}
