#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "vcontact/fem.hpp"

using namespace vcontact;

namespace {

Eigen::VectorXd field(const Mesh& m, const std::function<Eigen::Vector2d(double, double)>& u) {
  Eigen::VectorXd out(2 * m.node_count());
  for (std::size_t i = 0; i < m.node_count(); ++i) out.segment<2>(2 * i) = u(m.nodes()[i].x(), m.nodes()[i].y());
  return out;
}

double symmetry_defect(const SparseMatrix& M) {
  const SparseMatrix D = M - SparseMatrix(M.transpose());
  double worst = 0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(D, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// Independent energy integral: fit the affine map on each triangle from its
// three vertex values, then integrate the (constant) energy density with a
// 7-point Dunavant rule.
double energy_oracle(const Mesh& m, const Eigen::VectorXd& u, double mu, double lam) {
  static const double w[7] = {0.225, 0.132394152788506, 0.132394152788506, 0.132394152788506,
                              0.125939180544827, 0.125939180544827, 0.125939180544827};
  double total = 0;
  for (const auto& t : m.triangles()) {
    Eigen::Matrix3d P;
    Eigen::Matrix<double, 3, 2> V;
    for (int r = 0; r < 3; ++r) {
      P.row(r) << 1.0, m.node(t[r]).x(), m.node(t[r]).y();
      V.row(r) = u.segment<2>(2 * t[r]).transpose();
    }
    const Eigen::Matrix<double, 3, 2> coef = P.fullPivLu().solve(V);
    Eigen::Matrix2d grad;  // grad(i, j) = d u_i / d x_j
    grad << coef(1, 0), coef(2, 0), coef(1, 1), coef(2, 1);
    const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
    const double area = 0.5 * std::abs(P.determinant());
    double density = 0;
    for (double wi : w) density += wi * (2 * mu * eps.squaredNorm() + lam * eps.trace() * eps.trace());
    total += area * density;
  }
  return total;
}

}  // namespace

TEST_CASE("material parameters are validated") {
  MaterialParams p;
  CHECK_NOTHROW(p.validate());
  p.xi = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("dof map clamps the left side") {
  const Mesh m = Mesh::build_uniform(4);
  const DofMap d = DofMap::clamped(m);
  CHECK(d.full_size() == 50);
  CHECK(d.free_count() == 40);
  CHECK(d.free_index(2 * m.node_index(0, 2)) == -1);
  CHECK(d.free_index(2 * m.node_index(0, 0) + 1) == -1);
  CHECK(d.free_index(2 * m.node_index(1, 0)) >= 0);
  Eigen::VectorXd full = Eigen::VectorXd::LinSpaced(50, 1, 50);
  const Eigen::VectorXd back = d.expand(d.restrict(full));
  for (int i = 0; i < 50; ++i) CHECK(back[i] == (d.free_index(i) < 0 ? 0.0 : full[i]));
  CHECK(DofMap::unconstrained(m).free_count() == 50);
}

TEST_CASE("translations carry no strain energy") {
  const Mesh m = Mesh::build_uniform(5);
  const DofMap all = DofMap::unconstrained(m);
  const MaterialParams p;
  const auto t = field(m, [](double, double) { return Eigen::Vector2d(0.3, -1.7); });
  CHECK((assemble_viscosity(m, p, all) * t).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((assemble_elasticity(m, p, all) * t).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant-strain energies") {
  const MaterialParams p;
  for (int n : {1, 4, 9}) {
    const Mesh m = Mesh::build_uniform(n);
    const DofMap all = DofMap::unconstrained(m);
    const auto u = field(m, [](double x, double) { return Eigen::Vector2d(x, 0); });
    CHECK(u.dot(assemble_viscosity(m, p, all) * u) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(u.dot(assemble_elasticity(m, p, all) * u) == doctest::Approx(12.0).epsilon(1e-12));
  }
}

TEST_CASE("elasticity is viscosity with swapped coefficients") {
  const Mesh m = Mesh::build_uniform(3);
  const DofMap d = DofMap::clamped(m);
  MaterialParams p{1.5, 0.7, 3.25, 2.5};
  MaterialParams swapped{p.eta, p.lambda, 9.0, 9.0};
  const SparseMatrix diff = assemble_elasticity(m, p, d) - assemble_viscosity(m, swapped, d);
  CHECK(Eigen::MatrixXd(diff).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random field energy matches an independent quadrature") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  const Mesh m = Mesh::build_uniform(2);
  const DofMap all = DofMap::unconstrained(m);
  const MaterialParams p;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd u(2 * m.node_count());
    for (auto& v : u) v = U(rng);
    const double e = u.dot(assemble_viscosity(m, p, all) * u);
    CHECK(e == doctest::Approx(energy_oracle(m, u, p.phi, p.xi)).epsilon(1e-12));
  }
}

TEST_CASE("assembled operators are symmetric positive definite on free dofs") {
  for (int n : {1, 4, 16}) {
    const Mesh m = Mesh::build_uniform(n);
    const DofMap d = DofMap::clamped(m);
    const MaterialParams p;
    for (const SparseMatrix& M : {assemble_viscosity(m, p, d), assemble_elasticity(m, p, d)}) {
      CHECK(symmetry_defect(M) <= 1e-12);
      Eigen::SimplicialLLT<SparseMatrix> llt(M);
      CHECK(llt.info() == Eigen::Success);
    }
  }
}

TEST_CASE("load assembly") {
  const Mesh m1 = Mesh::build_uniform(1);
  const DofMap d1 = DofMap::clamped(m1);
  CHECK(assemble_load(m1, LoadData::constant({0, 0}, {0, 0}), 0.0, d1).isZero(0));

  // n = 1: free nodes (1,0) and (1,1) carry lumped areas 1/6 and 1/3.
  const Eigen::VectorXd F = assemble_load(m1, LoadData::constant({-2.5, -0.5}, {0, 0}), 0.0, d1);
  double fy = 0;
  for (Eigen::Index i = 1; i < F.size(); i += 2) fy += F[i];
  CHECK(fy == doctest::Approx(-0.5 * 0.5).epsilon(1e-14));

  const Mesh m = Mesh::build_uniform(6);
  const DofMap all = DofMap::unconstrained(m);
  const Eigen::VectorXd G = assemble_load(m, LoadData::constant({-2.5, -0.5}, {0, 0}), 0.0, all);
  CHECK(std::abs(G(Eigen::seq(0, Eigen::last, 2)).sum() + 2.5) <= 1e-12);
  CHECK(std::abs(G(Eigen::seq(1, Eigen::last, 2)).sum() + 0.5) <= 1e-12);

  // Traction acts on the top and right sides, total length 2.
  const Eigen::VectorXd H = assemble_load(m, LoadData::constant({0, 0}, {-0.2, 0.3}), 0.0, all);
  CHECK(std::abs(H(Eigen::seq(0, Eigen::last, 2)).sum() + 0.4) <= 1e-12);
  CHECK(std::abs(H(Eigen::seq(1, Eigen::last, 2)).sum() - 0.6) <= 1e-12);
  for (int ix = 0; ix < 6; ++ix) CHECK(H[2 * m.node_index(ix, 0)] == 0.0);  // nothing on the contact side

  // A linear body force is integrated exactly: int x dx = 1/2.
  LoadData lin;
  lin.f0 = [](const Eigen::Vector2d& x, double t) { return Eigen::Vector2d(x.x() * (1 + t), 0); };
  lin.fN = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d(0, 0); };
  const Eigen::VectorXd L = assemble_load(m, lin, 1.0, all);
  CHECK(std::abs(L(Eigen::seq(0, Eigen::last, 2)).sum() - 1.0) <= 1e-12);
}

TEST_CASE("V-norm of simple fields") {
  const Mesh m = Mesh::build_uniform(4);
  const DofMap d = DofMap::clamped(m);
  CHECK(v_norm(m, d, Eigen::VectorXd::Zero(d.free_count())) == 0.0);
  const auto ux = field(m, [](double x, double) { return Eigen::Vector2d(x, 0); });
  CHECK(v_norm(m, d, d.restrict(ux)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto shear = field(m, [](double x, double y) { return Eigen::Vector2d(y, x); });
  CHECK(v_norm_full(m, shear) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("contact trace decomposition") {
  const Mesh m = Mesh::build_uniform(4);
  const DofMap d = DofMap::clamped(m);
  const ContactQuadrature q = ContactQuadrature::build(m);
  CHECK(q.size() == 12);
  double total = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    total += q.points()[i].weight;
    if (i > 0) CHECK(q.points()[i].x.x() > q.points()[i - 1].x.x());
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));

  struct Case {
    Eigen::Vector2d u;
    double nu;
    double tau;
  };
  for (const Case& c : {Case{{0, -0.2}, 0.2, 0.0}, Case{{0.3, 0}, 0.0, 0.3}, Case{{0.3, -0.2}, 0.2, 0.3}}) {
    const auto u = field(m, [&](double x, double) { return Eigen::Vector2d(c.u * (x > 0 ? 1.0 : 0.0)); });
    for (const auto& s : contact_trace(q, d, d.restrict(u))) {
      if (s.x.x() < 0.25) continue;  // first edge touches the clamped corner
      CHECK(s.u_nu == doctest::Approx(c.nu).epsilon(1e-15));
      CHECK(s.u_tau.x() == doctest::Approx(c.tau).epsilon(1e-15));
      CHECK(s.u_tau.y() == 0.0);
      CHECK((s.u_nu * kContactNormal + s.u_tau - s.value).norm() <= 1e-14);
      CHECK(s.value.squaredNorm() == doctest::Approx(s.u_nu * s.u_nu + s.u_tau.squaredNorm()));
    }
  }

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  Eigen::VectorXd r(d.free_count());
  for (auto& v : r) v = U(rng);
  const Eigen::VectorXd t = q.trace_matrix(d) * r;
  const auto samples = contact_trace(q, d, r);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK((samples[i].value - t.segment<2>(2 * static_cast<Eigen::Index>(i))).norm() <= 1e-14);
    CHECK((samples[i].u_nu * kContactNormal + samples[i].u_tau - samples[i].value).norm() <= 1e-14);
  }
}

TEST_CASE("coordinate dump lists every stored entry") {
  const Mesh m = Mesh::build_uniform(1);
  const SparseMatrix A = assemble_viscosity(m, MaterialParams{}, DofMap::clamped(m));
  std::ostringstream os;
  write_coo(os, A);
  int lines = 0;
  std::istringstream is(os.str());
  for (std::string l; std::getline(is, l);) lines += l.empty() || l[0] == '%' ? 0 : 1;
  CHECK(lines == A.nonZeros());
}
