#include "thfortin/div_correction.hpp"

#include "thfortin/quadrature.hpp"

#include <stdexcept>

namespace thfortin {

DivergenceCorrection::DivergenceCorrection(std::shared_ptr<const FunctionSpace> bubbles)
    : bubbles_(std::move(bubbles)) {
  if (bubbles_->kind() != SpaceKind::EdgeBubble)
    throw std::invalid_argument("DivergenceCorrection: expects an edge-bubble space");
  const Mesh& mesh = bubbles_->mesh();

  std::vector<Eigen::Triplet<double>> triplets;
  for (Index e = 0; e < mesh.n_edges(); ++e) {
    const ModifiedBubble psi = modified_bubble(mesh, mesh.edges[e][0], mesh.edges[e][1]);
    for (const auto& [edge_id, coeff] : psi.edge_coefficients) {
      const Index slot = mesh.edge_interior_slot[edge_id];
      // psi_{j,i} = -psi_{i,j}
      triplets.emplace_back(slot, e, -coeff);
    }
  }
  psi_map_.resize(mesh.n_interior_edges(), mesh.n_edges());
  psi_map_.setFromTriplets(triplets.begin(), triplets.end());
}

int DivergenceCorrection::resolve_degree(const Field& v, int quad_degree) const {
  if (quad_degree >= 0) return quad_degree;
  if (const auto* dv = dynamic_cast<const DiscreteField*>(&v))
    return dv->space().max_poly_degree() + 1;
  throw std::invalid_argument(
      "DivergenceCorrection: a quadrature degree is required for non-discrete fields");
}

Eigen::VectorXd DivergenceCorrection::edge_weights(const Field& v, int quad_degree,
                                                   const std::vector<bool>* reversed_edges) const {
  const Mesh& mesh = bubbles_->mesh();
  const int degree = resolve_degree(v, quad_degree);
  const QuadratureRule rule = simplex_rule(mesh.dim, degree);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(mesh.n_edges());
  for (Index cell = 0; cell < mesh.n_cells(); ++cell) {
    const CellGeometry geo = cell_geometry(mesh, cell);
    const auto& edges = mesh.cell_edges[cell];
    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      const Eigen::VectorXd x = geo.point(lambda);
      const Eigen::VectorXd vv = v.value(cell, geo, lambda, x);
      const double w = rule.weights[q] * geo.volume;
      for (std::size_t le = 0; le < edges.size(); ++le) {
        const auto [a, b] = local_edge_vertices(mesh.dim, static_cast<int>(le));
        const bool rev = reversed_edges && (*reversed_edges)[edges[le]];
        const double sign = rev ? -1.0 : 1.0;
        // kernel of c_e: hat_j grad hat_i - hat_i grad hat_j (global i < j
        // matches local a < b because cell vertices are ascending)
        const double k = lambda[b] * geo.grads.row(a).dot(vv) -
                         lambda[a] * geo.grads.row(b).dot(vv);
        c[edges[le]] += sign * w * k;
      }
    }
  }
  return c;
}

Eigen::VectorXd DivergenceCorrection::apply(const Field& v, int quad_degree,
                                            const std::vector<bool>* reversed_edges) const {
  const Eigen::VectorXd c = edge_weights(v, quad_degree, reversed_edges);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(bubbles_->dim());
  const Mesh& mesh = bubbles_->mesh();
  for (Index e = 0; e < mesh.n_edges(); ++e) {
    const bool rev = reversed_edges && (*reversed_edges)[e];
    const double sign = rev ? -1.0 : 1.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(psi_map_, e); it; ++it)
      out[it.row()] += sign * it.value() * c[e];
  }
  return out;
}

Eigen::VectorXd DivergenceCorrection::apply_per_node(const Field& v, int quad_degree) const {
  const Mesh& mesh = bubbles_->mesh();
  const int degree = resolve_degree(v, quad_degree);
  const QuadratureRule rule = simplex_rule(mesh.dim, degree);

  // w_fwd[e] = w_ij, w_rev[e] = w_ji for canonical edge e = [i < j],
  // w_ij = -<hat_i v, grad hat_j>.
  Eigen::VectorXd w_fwd = Eigen::VectorXd::Zero(mesh.n_edges());
  Eigen::VectorXd w_rev = Eigen::VectorXd::Zero(mesh.n_edges());
  for (Index cell = 0; cell < mesh.n_cells(); ++cell) {
    const CellGeometry geo = cell_geometry(mesh, cell);
    const auto& edges = mesh.cell_edges[cell];
    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      const Eigen::VectorXd x = geo.point(lambda);
      const Eigen::VectorXd vv = v.value(cell, geo, lambda, x);
      const double w = rule.weights[q] * geo.volume;
      for (std::size_t le = 0; le < edges.size(); ++le) {
        const auto [a, b] = local_edge_vertices(mesh.dim, static_cast<int>(le));
        w_fwd[edges[le]] -= w * lambda[a] * geo.grads.row(b).dot(vv);
        w_rev[edges[le]] -= w * lambda[b] * geo.grads.row(a).dot(vv);
      }
    }
  }

  // Ordered pair (i, j) contributes w_ij psi_{j,i}; psi_map already stores
  // psi_{j,i} per canonical edge, and psi_{i,j} = -psi_{j,i}.
  Eigen::VectorXd out = Eigen::VectorXd::Zero(bubbles_->dim());
  for (Index e = 0; e < mesh.n_edges(); ++e)
    for (Eigen::SparseMatrix<double>::InnerIterator it(psi_map_, e); it; ++it)
      out[it.row()] += it.value() * w_fwd[e] - it.value() * w_rev[e];
  return out;
}

Eigen::SparseMatrix<double> DivergenceCorrection::matrix(const FunctionSpace& input,
                                                         int quad_degree) const {
  const Mesh& mesh = bubbles_->mesh();
  if (input.mesh_ptr().get() != bubbles_->mesh_ptr().get())
    throw std::invalid_argument("DivergenceCorrection::matrix: input space lives on another mesh");
  if (input.value_dim() != mesh.dim)
    throw std::invalid_argument("DivergenceCorrection::matrix: input space is not vector valued");
  const int degree = quad_degree >= 0 ? quad_degree : input.max_poly_degree() + 1;
  const QuadratureRule rule = simplex_rule(mesh.dim, degree);

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
  for (Index cell = 0; cell < mesh.n_cells(); ++cell) {
    const CellGeometry geo = cell_geometry(mesh, cell);
    const auto& edges = mesh.cell_edges[cell];
    const auto& dofs = input.cell_dofs(cell);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(static_cast<Index>(edges.size()),
                                                  static_cast<Index>(dofs.size()));
    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      input.eval_local(cell, geo, lambda, values, grads, false);
      const double w = rule.weights[q] * geo.volume;
      for (std::size_t le = 0; le < edges.size(); ++le) {
        const auto [a, b] = local_edge_vertices(mesh.dim, static_cast<int>(le));
        const Eigen::RowVectorXd kernel =
            lambda[b] * geo.grads.row(a) - lambda[a] * geo.grads.row(b);
        local.row(static_cast<Index>(le)) += w * kernel * values;
      }
    }
    for (std::size_t le = 0; le < edges.size(); ++le)
      for (std::size_t l = 0; l < dofs.size(); ++l)
        if (local(static_cast<Index>(le), static_cast<Index>(l)) != 0.0)
          triplets.emplace_back(edges[le], dofs[l].global,
                                local(static_cast<Index>(le), static_cast<Index>(l)));
  }

  Eigen::SparseMatrix<double> weights(mesh.n_edges(), input.dim());
  weights.setFromTriplets(triplets.begin(), triplets.end());
  return psi_map_ * weights;
}

}  // namespace thfortin
