#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thfortin/analysis.hpp"
#include "thfortin/assembly.hpp"
#include "thfortin/fortin.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace thfortin;

namespace {

std::shared_ptr<const Mesh> shared_mesh(Mesh mesh) {
  return std::make_shared<const Mesh>(std::move(mesh));
}

Eigen::VectorXd zero_trace_coefficients(const FortinOperator& fortin, std::uint64_t seed) {
  const auto& zt = *fortin.target_zero_trace_space();
  return zero_trace_embedding(zt, *fortin.target_space()) * random_coefficients(zt.dim(), seed);
}

Eigen::VectorXd p1_moments_of_divergence(const FortinOperator& fortin, const DiscreteField& f) {
  auto p1 = make_space(fortin.mesh_ptr(), SpaceKind::P1Scalar);
  auto space = make_space(fortin.mesh_ptr(), f.space().kind());
  return assemble_operator(OperatorTag::divergence, p1, space).matrix * f.coefficients();
}

}  // namespace

TEST_CASE("scott-zhang sites prefer boundary faces, then lowest cells") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto target = make_space(mesh, SpaceKind::P2VectorFull);
  const ScottZhangOperator sz(target);
  REQUIRE(static_cast<Index>(sz.sites().size()) == target->dim());

  for (Index v = 0; v < mesh->n_vertices(); ++v) {
    for (Index dof : target->vertex_dofs(v)) {
      const auto& site = sz.sites()[dof];
      CHECK(site.on_boundary == mesh->vertex_on_boundary[v]);
      if (!site.on_boundary) CHECK(site.entity == mesh->vertex_cells[v].front());
    }
  }
}

TEST_CASE("scott-zhang reproduces its target space") {
  for (int dim : {2, 3}) {
    auto mesh = shared_mesh(freudenthal_cube(dim, 2));
    for (SpaceKind kind : {SpaceKind::P2VectorFull, SpaceKind::ReducedVelocityFull}) {
      auto target = make_space(mesh, kind);
      const ScottZhangOperator sz(target);
      const Eigen::VectorXd coeffs = random_coefficients(target->dim(), 17);
      const Eigen::VectorXd projected = sz.apply(DiscreteField(target, coeffs));
      CHECK((projected - coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("scott-zhang reproduces constants from analytic input") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto target = make_space(mesh, SpaceKind::P2VectorFull);
  const ScottZhangOperator sz(target);
  const AnalyticField constant(2, [](const Eigen::VectorXd&) {
    Eigen::VectorXd c(2);
    c << 0.75, -0.25;
    return c;
  });
  const Eigen::VectorXd coeffs = sz.apply(constant, 4);
  for (Index v = 0; v < mesh->n_vertices(); ++v) {
    const auto dofs = target->vertex_dofs(v);
    CHECK(coeffs[dofs[0]] == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(coeffs[dofs[1]] == doctest::Approx(-0.25).epsilon(1e-13));
  }
}

TEST_CASE("scott-zhang zeroes boundary coefficients of zero trace fields exactly") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto target = make_space(mesh, SpaceKind::P2VectorFull);
  const ScottZhangOperator sz(target);
  const AnalyticField v(2, [](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2);
    out << x[0] * (1 - x[0]) * x[1] * (1 - x[1]), 0.0;
    return out;
  });
  const Eigen::VectorXd coeffs = sz.apply(v, 6);
  for (Index dof : target->boundary_dofs()) CHECK(coeffs[dof] == 0.0);
  // the interior is not zero
  CHECK(coeffs.lpNorm<Eigen::Infinity>() > 1e-4);
}

TEST_CASE("scott-zhang boundary coefficients depend only on the trace") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  auto target = make_space(mesh, SpaceKind::P2VectorFull);
  const ScottZhangOperator sz(target);
  const AnalyticField linear(2, [](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2);
    out << 0.3 * x[0] - 0.1 * x[1] + 0.5, x[0] + x[1];
    return out;
  });
  const AnalyticField sum(2, [](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2);
    out << 0.3 * x[0] - 0.1 * x[1] + 0.5 + x[0] * (1 - x[0]) * x[1] * (1 - x[1]),
        x[0] + x[1] + 2 * x[0] * x[0] * (1 - x[0]) * x[1] * (1 - x[1]);
    return out;
  });
  const Eigen::VectorXd a = sz.apply(linear, 8);
  const Eigen::VectorXd b = sz.apply(sum, 8);
  for (Index dof : target->boundary_dofs()) CHECK(a[dof] == b[dof]);
}

TEST_CASE("divergence correction routes agree and ignore orientation") {
  auto mesh = shared_mesh(freudenthal_cube(2, 3));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  const auto& correction = fortin.correction();

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const DiscreteField v(fortin.input_space(), zero_trace_coefficients(fortin, 100 + trial));
    const Eigen::VectorXd per_edge = correction.apply(v);
    const Eigen::VectorXd per_node = correction.apply_per_node(v);
    CHECK((per_edge - per_node).lpNorm<Eigen::Infinity>() <= 1e-13);

    std::vector<bool> reversed(mesh->n_edges());
    for (Index e = 0; e < mesh->n_edges(); ++e) reversed[e] = (rng() & 1) != 0;
    const Eigen::VectorXd flipped = correction.apply(v, -1, &reversed);
    CHECK((per_edge - flipped).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
}

TEST_CASE("divergence correction preserves p1 moments of the divergence") {
  for (auto mesh : {shared_mesh(freudenthal_cube(2, 3)), shared_mesh(octahedron_basic())}) {
    FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
    auto bubbles = make_space(mesh, SpaceKind::EdgeBubble);
    auto p1 = make_space(mesh, SpaceKind::P1Scalar);
    const auto b_bubble = assemble_operator(OperatorTag::divergence, p1, bubbles);

    for (int trial = 0; trial < 3; ++trial) {
      const DiscreteField v(fortin.input_space(), zero_trace_coefficients(fortin, 7 * trial + 1));
      const Eigen::VectorXd c = fortin.correction().apply(v);
      const Eigen::VectorXd lhs = b_bubble.matrix * c;
      const Eigen::VectorXd rhs = p1_moments_of_divergence(fortin, v);
      CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
}

TEST_CASE("correction matrix matches apply") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  const auto& input = *fortin.input_space();
  const Eigen::SparseMatrix<double> w = fortin.correction().matrix(input);
  const Eigen::VectorXd coeffs = random_coefficients(input.dim(), 31);
  const DiscreteField v(fortin.input_space(), coeffs);
  CHECK((w * coeffs - fortin.correction().apply(v)).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("correction output stays near a local perturbation") {
  auto mesh = shared_mesh(freudenthal_cube(2, 4));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  auto input = fortin.input_space();

  // pick a cell whose vertices are all interior, and one that touches the
  // boundary, and perturb a field on just that cell
  Index interior_cell = -1;
  Index general_cell = -1;
  for (Index c = 0; c < mesh->n_cells(); ++c) {
    bool all_interior = true;
    for (Index v : mesh->cells[c]) all_interior = all_interior && !mesh->vertex_on_boundary[v];
    if (all_interior && interior_cell < 0) interior_cell = c;
    if (!all_interior && general_cell < 0) general_cell = c;
  }
  REQUIRE(interior_cell >= 0);
  REQUIRE(general_cell >= 0);

  for (const Index seed_cell : {interior_cell, general_cell}) {
    const DiscreteField full(input, random_coefficients(input->dim(), 55));
    const CellMaskedField masked(full, *mesh, {seed_cell});
    const Eigen::VectorXd c = fortin.correction().apply(masked, 3);

    const PatchSet omega0 = node_neighborhood(*mesh, {seed_cell});
    const bool interior = seed_cell == interior_cell;
    const PatchSet allowed =
        interior ? node_neighborhood(*mesh, edge_neighborhood(*mesh, {seed_cell}).cells)
                 : node_neighborhood(*mesh, omega0.cells);
    std::set<Index> allowed_cells(allowed.cells.begin(), allowed.cells.end());

    for (Index e : mesh->interior_edges) {
      const Index slot = mesh->edge_interior_slot[e];
      if (std::abs(c[slot]) < 1e-14) continue;
      for (Index cell : mesh->edge_cells[e]) CHECK(allowed_cells.count(cell) == 1);
    }
  }
}

TEST_CASE("fortin reproduces target fields and has exact zero boundary rows") {
  for (auto variant : {FortinOperator::Variant::taylor_hood, FortinOperator::Variant::reduced}) {
    auto mesh = shared_mesh(freudenthal_cube(2, 3));
    FortinOperator fortin(mesh, variant);
    const Eigen::VectorXd coeffs = zero_trace_coefficients(fortin, 5);

    Eigen::VectorXd out;
    if (variant == FortinOperator::Variant::taylor_hood) {
      out = fortin.apply(DiscreteField(fortin.target_space(), coeffs));
    } else {
      const Eigen::SparseMatrix<double> lift =
          reduced_to_p2_embedding(*fortin.target_space(), *fortin.input_space());
      out = fortin.apply(DiscreteField(fortin.input_space(), lift * coeffs));
    }
    CHECK((out - coeffs).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("fortin is idempotent") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  const Eigen::VectorXd coeffs =
      zero_trace_embedding(*fortin.input_zero_trace_space(), *fortin.input_space()) *
      random_coefficients(fortin.input_zero_trace_space()->dim(), 12);
  const Eigen::VectorXd once = fortin.apply(DiscreteField(fortin.input_space(), coeffs));
  const Eigen::VectorXd twice = fortin.apply(DiscreteField(fortin.target_space(), once));
  CHECK((twice - once).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("fortin matrix agrees with apply and kills boundary dofs") {
  for (auto variant : {FortinOperator::Variant::taylor_hood, FortinOperator::Variant::reduced}) {
    auto mesh = shared_mesh(freudenthal_cube(2, 2));
    FortinOperator fortin(mesh, variant);
    const Eigen::SparseMatrix<double> pi = fortin.matrix();
    CHECK(pi.rows() == fortin.target_space()->dim());
    CHECK(pi.cols() == fortin.input_space()->dim());

    const Eigen::VectorXd coeffs = random_coefficients(fortin.input_space()->dim(), 8);
    const Eigen::VectorXd via_matrix = pi * coeffs;
    const Eigen::VectorXd via_apply = fortin.apply(DiscreteField(fortin.input_space(), coeffs));
    CHECK((via_matrix - via_apply).lpNorm<Eigen::Infinity>() <= 1e-12);

    // a zero-trace input keeps every boundary dof of the target at exact zero
    const Eigen::VectorXd zt_in =
        zero_trace_embedding(*fortin.input_zero_trace_space(), *fortin.input_space()) *
        random_coefficients(fortin.input_zero_trace_space()->dim(), 9);
    const Eigen::VectorXd out = fortin.apply(DiscreteField(fortin.input_space(), zt_in));
    for (Index dof : fortin.target_space()->boundary_dofs()) CHECK(out[dof] == 0.0);
  }
}

TEST_CASE("fortin preserves divergence moments of discrete fields") {
  for (auto mesh : {shared_mesh(freudenthal_cube(2, 2)), shared_mesh(freudenthal_cube(3, 2))}) {
    for (auto variant : {FortinOperator::Variant::taylor_hood, FortinOperator::Variant::reduced}) {
      FortinOperator fortin(mesh, variant);
      const DiscreteField v(fortin.input_space(),
                            zero_trace_embedding(*fortin.input_zero_trace_space(),
                                                 *fortin.input_space()) *
                                random_coefficients(fortin.input_zero_trace_space()->dim(), 3));
      const DivergenceResidual residual = divergence_residual(fortin, v);
      CHECK(residual.max_residual <= 1e-12);
      CHECK(residual.reference_scale > 1e-6);
    }
  }
}

TEST_CASE("fortin preserves divergence moments of polynomial curl fields") {
  auto mesh = shared_mesh(freudenthal_cube(2, 3));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  auto field = make_poly_curl_field(2);
  const DivergenceResidual residual = divergence_residual(fortin, *field, 6);
  CHECK(residual.max_residual <= 1e-10);
}

TEST_CASE("meshes violating the relay assumption are rejected at construction") {
  auto mesh = shared_mesh(freudenthal_cube(2, 1));
  CHECK_THROWS_AS(FortinOperator(mesh, FortinOperator::Variant::taylor_hood),
                  std::runtime_error);
}

TEST_CASE("analytic input without a quadrature degree is rejected") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  const AnalyticField v(2, [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Zero(2).eval();
  });
  CHECK_THROWS_AS(fortin.apply(v), std::invalid_argument);
}
