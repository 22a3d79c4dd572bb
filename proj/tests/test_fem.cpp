#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thfortin/assembly.hpp"
#include "thfortin/fortin.hpp"
#include "thfortin/quadrature.hpp"

#include <cmath>
#include <random>

using namespace thfortin;

namespace {

std::shared_ptr<const Mesh> shared_mesh(Mesh mesh) {
  return std::make_shared<const Mesh>(std::move(mesh));
}

Eigen::VectorXd random_lambda(int dim, std::mt19937_64& rng) {
  Eigen::VectorXd lambda(dim + 1);
  for (int a = 0; a <= dim; ++a)
    lambda[a] = -std::log(1.0 - static_cast<double>(rng() >> 11) * 0x1.0p-53);
  lambda /= lambda.sum();
  return lambda;
}

}  // namespace

TEST_CASE("space dimensions match the mesh census") {
  for (int dim : {2, 3}) {
    for (int n : {1, 2, 3}) {
      auto mesh = shared_mesh(freudenthal_cube(dim, n));
      const Index nv = mesh->n_vertices();
      const Index ne = mesh->n_edges();
      const Index nc = mesh->n_cells();
      const Index iv = mesh->n_interior_vertices();
      const Index ie = mesh->n_interior_edges();
      CHECK(FunctionSpace(mesh, SpaceKind::P1Scalar).dim() == nv);
      CHECK(FunctionSpace(mesh, SpaceKind::P1Pressure).dim() == nv);
      CHECK(FunctionSpace(mesh, SpaceKind::P0Scalar).dim() == nc);
      CHECK(FunctionSpace(mesh, SpaceKind::AugmentedPressure).dim() == nv + nc);
      CHECK(FunctionSpace(mesh, SpaceKind::P1VectorZeroTrace).dim() == dim * iv);
      CHECK(FunctionSpace(mesh, SpaceKind::P2VectorZeroTrace).dim() == dim * (iv + ie));
      CHECK(FunctionSpace(mesh, SpaceKind::P2VectorFull).dim() == dim * (nv + ne));
      CHECK(FunctionSpace(mesh, SpaceKind::EdgeBubble).dim() == ie);
      CHECK(FunctionSpace(mesh, SpaceKind::ReducedVelocityZeroTrace).dim() == dim * iv + ie);
      CHECK(FunctionSpace(mesh, SpaceKind::ReducedVelocityFull).dim() == dim * nv + ie);
    }
  }
}

TEST_CASE("partition of unity at random points") {
  std::mt19937_64 rng(7);
  for (auto mesh : {shared_mesh(freudenthal_cube(2, 2)), shared_mesh(freudenthal_cube(3, 1))}) {
    const FunctionSpace p1(mesh, SpaceKind::P1Scalar);
    const FunctionSpace p2(mesh, SpaceKind::P2VectorFull);
    Eigen::MatrixXd values;
    std::vector<Eigen::MatrixXd> grads;
    for (Index c = 0; c < mesh->n_cells(); ++c) {
      const CellGeometry geo = cell_geometry(*mesh, c);
      for (int trial = 0; trial < 50; ++trial) {
        const Eigen::VectorXd lambda = random_lambda(mesh->dim, rng);
        p1.eval_local(c, geo, lambda, values, grads, false);
        CHECK(std::abs(values.row(0).sum() - 1.0) <= 1e-13);
        p2.eval_local(c, geo, lambda, values, grads, false);
        for (int k = 0; k < mesh->dim; ++k) CHECK(std::abs(values.row(k).sum() - 1.0) <= 1e-13);
      }
    }
  }
}

TEST_CASE("basis gradients match finite differences") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  std::mt19937_64 rng(11);
  for (SpaceKind kind : {SpaceKind::P2VectorFull, SpaceKind::ReducedVelocityFull}) {
    auto space = make_space(mesh, kind);
    const DiscreteField field(space, random_coefficients(space->dim(), 3));
    const Index c = 3;
    const CellGeometry geo = cell_geometry(*mesh, c);
    const Eigen::VectorXd lambda = random_lambda(2, rng) * 0.8 +
                                   Eigen::VectorXd::Constant(3, 1.0 / 15.0);
    const Eigen::VectorXd x = geo.point(lambda);
    const Eigen::MatrixXd jac = field.gradient(c, geo, lambda, x);
    const double step = 1e-6;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp[j] += step;
      xm[j] -= step;
      const Eigen::VectorXd vp = field.value(c, geo, geo.barycentric(xp), xp);
      const Eigen::VectorXd vm = field.value(c, geo, geo.barycentric(xm), xm);
      for (int i = 0; i < 2; ++i)
        CHECK(jac(i, j) == doctest::Approx((vp[i] - vm[i]) / (2 * step)).epsilon(1e-5));
    }
  }
}

TEST_CASE("unit triangle mass and stiffness") {
  Eigen::MatrixXd verts(2, 3);
  verts << 0, 1, 0, 0, 0, 1;
  auto mesh = shared_mesh(build_mesh(2, verts, {{0, 1, 2}}));
  auto p1 = make_space(mesh, SpaceKind::P1Scalar);

  const Eigen::MatrixXd mass(assemble_operator(OperatorTag::mass, p1, p1).matrix);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(mass(i, j) == doctest::Approx(i == j ? 1.0 / 12 : 1.0 / 24).epsilon(1e-14));

  const Eigen::MatrixXd stiff(assemble_operator(OperatorTag::stiffness, p1, p1).matrix);
  CHECK(stiff(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(stiff(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(stiff(0, 2) == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("assembly is the sum of per cell integrals") {
  Eigen::MatrixXd verts(2, 4);
  verts << 0, 1, 0, 1, 0, 0, 1, 1;
  auto mesh = shared_mesh(build_mesh(2, verts, {{0, 1, 2}, {1, 2, 3}}));
  auto p1 = make_space(mesh, SpaceKind::P1Scalar);
  const Eigen::MatrixXd mass(assemble_operator(OperatorTag::mass, p1, p1).matrix);

  Eigen::MatrixXd byhand = Eigen::MatrixXd::Zero(4, 4);
  const QuadratureRule rule = simplex_rule(2, 2);
  for (Index c = 0; c < mesh->n_cells(); ++c) {
    const CellGeometry geo = cell_geometry(*mesh, c);
    for (int q = 0; q < rule.n_points(); ++q)
      for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b)
          byhand(mesh->cells[c][a], mesh->cells[c][b]) +=
              rule.weights[q] * geo.volume * rule.points(a, q) * rule.points(b, q);
  }
  CHECK((mass - byhand).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("mass and stiffness are symmetric, stiffness is elliptic on zero trace") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto space = make_space(mesh, SpaceKind::P2VectorZeroTrace);
  const auto mass = assemble_operator(OperatorTag::mass, space, space).matrix;
  const auto stiff = assemble_operator(OperatorTag::stiffness, space, space).matrix;
  const Eigen::MatrixXd md(mass);
  const Eigen::MatrixXd kd(stiff);
  CHECK((md - md.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((kd - kd.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(md).info() == Eigen::Success);
  CHECK(Eigen::LLT<Eigen::MatrixXd>(kd).info() == Eigen::Success);
}

TEST_CASE("divergence of a normalized interior bubble pairs to plus minus one") {
  for (auto mesh : {shared_mesh(freudenthal_cube(2, 3)), shared_mesh(octahedron_basic())}) {
    auto p1 = make_space(mesh, SpaceKind::P1Scalar);
    auto bubbles = make_space(mesh, SpaceKind::EdgeBubble);
    const Eigen::MatrixXd b(assemble_operator(OperatorTag::divergence, p1, bubbles).matrix);
    for (Index e : mesh->interior_edges) {
      const Index slot = mesh->edge_interior_slot[e];
      for (Index v = 0; v < mesh->n_vertices(); ++v) {
        double expected = 0;
        if (v == mesh->edges[e][0]) expected = 1;
        if (v == mesh->edges[e][1]) expected = -1;
        CHECK(std::abs(b(v, slot) - expected) <= 1e-13);
      }
    }
  }
}

TEST_CASE("mismatched meshes are rejected") {
  auto mesh_a = shared_mesh(freudenthal_cube(2, 2));
  auto mesh_b = shared_mesh(freudenthal_cube(2, 2));
  auto rows = make_space(mesh_a, SpaceKind::P1Scalar);
  auto cols = make_space(mesh_b, SpaceKind::P1Scalar);
  CHECK_THROWS(assemble_operator(OperatorTag::mass, rows, cols));
  CHECK_THROWS(assemble_operator(OperatorTag::divergence, rows,
                                 make_space(mesh_a, SpaceKind::P1Scalar)));
}

TEST_CASE("boundary dof census") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  const FunctionSpace p2(mesh, SpaceKind::P2VectorFull);
  CHECK(static_cast<Index>(p2.boundary_dofs().size()) == 2 * (8 + 8));
  const FunctionSpace zt(mesh, SpaceKind::P2VectorZeroTrace);
  CHECK(zt.boundary_dofs().empty());
  const FunctionSpace reduced(mesh, SpaceKind::ReducedVelocityFull);
  CHECK(static_cast<Index>(reduced.boundary_dofs().size()) == 2 * 8);
}

TEST_CASE("reduced fields embed exactly into quadratics") {
  auto mesh = shared_mesh(freudenthal_cube(2, 3));
  auto reduced = make_space(mesh, SpaceKind::ReducedVelocityFull);
  auto p2 = make_space(mesh, SpaceKind::P2VectorFull);
  const Eigen::VectorXd coeffs = random_coefficients(reduced->dim(), 21);
  const DiscreteField w(reduced, coeffs);
  const DiscreteField lifted(p2, reduced_to_p2_embedding(*reduced, *p2) * coeffs);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Index c = static_cast<Index>(rng() % mesh->n_cells());
    const CellGeometry geo = cell_geometry(*mesh, c);
    const Eigen::VectorXd lambda = random_lambda(2, rng);
    const Eigen::VectorXd x = geo.point(lambda);
    const Eigen::VectorXd diff = w.value(c, geo, lambda, x) - lifted.value(c, geo, lambda, x);
    CHECK(diff.lpNorm<Eigen::Infinity>() <= 1e-13);
  }
}

TEST_CASE("zero trace embedding selects the interior block") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto zt = make_space(mesh, SpaceKind::P2VectorZeroTrace);
  auto full = make_space(mesh, SpaceKind::P2VectorFull);
  const Eigen::SparseMatrix<double> embed = zero_trace_embedding(*zt, *full);
  CHECK(embed.rows() == full->dim());
  CHECK(embed.cols() == zt->dim());
  const Eigen::VectorXd coeffs = random_coefficients(zt->dim(), 2);
  const Eigen::VectorXd lifted = embed * coeffs;
  for (Index dof : full->boundary_dofs()) CHECK(lifted[dof] == 0.0);
  CHECK(lifted.lpNorm<1>() == doctest::Approx(coeffs.lpNorm<1>()).epsilon(1e-15));
}

TEST_CASE("error norms vanish for identical fields") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto space = make_space(mesh, SpaceKind::P2VectorFull);
  const DiscreteField f(space, random_coefficients(space->dim(), 4));
  const ErrorNorms err = error_norms(*mesh, f, f, 4);
  CHECK(err.l2 == 0.0);
  CHECK(err.h1_semi == 0.0);
  const AnalyticField one(2, [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Ones(2).eval();
  });
  CHECK(integrate_pairing(*mesh, one, one, 2) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("random coefficients are deterministic and bounded") {
  const Eigen::VectorXd a = random_coefficients(100, 42);
  const Eigen::VectorXd b = random_coefficients(100, 42);
  const Eigen::VectorXd c = random_coefficients(100, 43);
  CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((a - c).lpNorm<Eigen::Infinity>() > 0.0);
  CHECK(a.maxCoeff() <= 1.0);
  CHECK(a.minCoeff() >= -1.0);
}
