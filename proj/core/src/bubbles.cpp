#include "thfortin/bubbles.hpp"

#include "thfortin/quadrature.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace thfortin {

double bubble_normalization(const Mesh& mesh, Index edge) {
  double vol = 0.0;
  for (Index c : mesh.edge_cells.at(edge)) vol += mesh.cell_volumes[c];
  return static_cast<double>((mesh.dim + 1) * (mesh.dim + 2)) / vol;
}

TangentialBubbleField::TangentialBubbleField(const Mesh& mesh, Index a, Index b, bool normalized)
    : mesh_(mesh), a_(a), b_(b), factor_(1.0) {
  const Index e = mesh.find_edge(a, b);
  if (e < 0)
    throw std::invalid_argument("TangentialBubbleField: {" + std::to_string(a) + ", " +
                                std::to_string(b) + "} is not a mesh edge");
  if (normalized) factor_ = bubble_normalization(mesh, e);
  tangent_ = mesh.vertex(b) - mesh.vertex(a);
}

std::pair<int, int> TangentialBubbleField::locate(Index cell) const {
  const auto& cv = mesh_.cells[cell];
  int la = -1, lb = -1;
  for (int l = 0; l < static_cast<int>(cv.size()); ++l) {
    if (cv[l] == a_) la = l;
    if (cv[l] == b_) lb = l;
  }
  if (la < 0 || lb < 0) return {-1, -1};
  return {la, lb};
}

Eigen::VectorXd TangentialBubbleField::value(Index cell, const CellGeometry&,
                                             const Eigen::VectorXd& lambda,
                                             const Eigen::VectorXd&) const {
  const auto [la, lb] = locate(cell);
  if (la < 0) return Eigen::VectorXd::Zero(mesh_.dim);
  return factor_ * lambda[la] * lambda[lb] * tangent_;
}

Eigen::MatrixXd TangentialBubbleField::gradient(Index cell, const CellGeometry& geo,
                                                const Eigen::VectorXd& lambda,
                                                const Eigen::VectorXd&) const {
  const auto [la, lb] = locate(cell);
  if (la < 0) return Eigen::MatrixXd::Zero(mesh_.dim, mesh_.dim);
  return factor_ * tangent_ *
         (lambda[lb] * geo.grads.row(la) + lambda[la] * geo.grads.row(lb));
}

Eigen::VectorXd bubble_divergence_pairings(const Mesh& mesh, Index a, Index b, bool normalized,
                                           int quad_degree) {
  const TangentialBubbleField bubble(mesh, a, b, normalized);
  const QuadratureRule rule = simplex_rule(mesh.dim, quad_degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.n_vertices());
  const Index e = mesh.find_edge(a, b);
  for (Index c : mesh.edge_cells.at(e)) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& cv = mesh.cells[c];
    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      const double dv = bubble.gradient(c, geo, lambda, Eigen::VectorXd()).trace();
      const double w = rule.weights[q] * geo.volume;
      for (int l = 0; l < static_cast<int>(cv.size()); ++l)
        out[cv[l]] += w * dv * lambda[l];
    }
  }
  return out;
}

ModifiedBubble modified_bubble(const Mesh& mesh, Index i, Index j) {
  const Index e = mesh.find_edge(i, j);
  if (e < 0)
    throw std::invalid_argument("modified_bubble: {" + std::to_string(i) + ", " +
                                std::to_string(j) + "} is not a mesh edge");
  ModifiedBubble psi;
  psi.i = i;
  psi.j = j;

  // b_{a,b} with a > b is -1 times the stored canonical bubble.
  auto push = [&](Index a, Index b, double coeff) {
    const Index f = mesh.find_edge(a, b);
    const Index slot_edge = f;
    const double sign = a < b ? 1.0 : -1.0;
    if (mesh.edge_on_boundary[slot_edge])
      throw std::logic_error("modified_bubble: relay produced a boundary edge");
    psi.edge_coefficients.emplace_back(slot_edge, sign * coeff);
  };

  if (!mesh.edge_on_boundary[e]) {
    push(i, j, 1.0);
    return psi;
  }

  Index m = -1;
  for (Index c : mesh.edge_cells[e])
    for (Index v : mesh.cells[c])
      if (!mesh.vertex_on_boundary[v] && (m < 0 || v < m)) m = v;
  if (m < 0)
    throw std::runtime_error(
        "modified_bubble: no interior vertex in any cell containing boundary edge {" +
        std::to_string(i) + ", " + std::to_string(j) +
        "}; the mesh violates the every-cell-touches-an-interior-vertex assumption");
  psi.relay = m;
  push(i, m, 1.0);
  push(m, j, 1.0);
  return psi;
}

}  // namespace thfortin
