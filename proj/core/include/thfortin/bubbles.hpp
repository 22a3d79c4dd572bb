#pragma once

#include "thfortin/field.hpp"

#include <utility>
#include <vector>

namespace thfortin {

/// Normalization that turns the raw tangential bubble phi_a phi_b (x_b - x_a)
/// on edge e into one whose divergence pairs to exactly +-1 with the P1 hat
/// functions of the edge endpoints: (d+1)(d+2) / |patch(e)|.
double bubble_normalization(const Mesh& mesh, Index edge);

/// The tangential edge bubble on edge {a, b}, oriented along x_b - x_a;
/// swapping a and b flips the sign. Supported on the cells containing the
/// edge. With normalized = true the bubble_normalization factor is applied.
class TangentialBubbleField : public Field {
 public:
  TangentialBubbleField(const Mesh& mesh, Index a, Index b, bool normalized);

  int value_dim() const override { return mesh_.dim; }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd value(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                        const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd gradient(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& x) const override;

  double factor() const { return factor_; }

 private:
  /// Local vertex indices of a_ and b_ in the cell, or (-1, *) when the cell
  /// does not contain the edge.
  std::pair<int, int> locate(Index cell) const;

  const Mesh& mesh_;
  Index a_, b_;
  double factor_;
  Eigen::VectorXd tangent_;
};

/// <div bubble_{a,b}, hat_k> for every vertex k, by quadrature of the given
/// degree (the integrand is quadratic, so degree >= 2 is exact).
Eigen::VectorXd bubble_divergence_pairings(const Mesh& mesh, Index a, Index b, bool normalized,
                                           int quad_degree = 2);

/// The divergence-unit bubble psi_{i,j} on edge {i, j}, written in the basis
/// of normalized interior-edge bubbles: <div psi_{i,j}, hat_k> =
/// delta_{ik} - delta_{jk}. For an interior edge this is the edge's own
/// normalized bubble; for a boundary edge it is relayed through the
/// smallest-index interior vertex m found among the vertices of the cells
/// containing the edge (psi = b_{i,m} + b_{m,j}). Throws std::runtime_error
/// when no such vertex exists, i.e. when some cell at the edge violates the
/// every-cell-touches-an-interior-vertex assumption.
struct ModifiedBubble {
  Index i = -1;
  Index j = -1;
  Index relay = -1;  ///< interior vertex m, or -1 for an interior edge
  /// (interior edge id, coefficient of that edge's normalized bubble in
  /// canonical min<max orientation)
  std::vector<std::pair<Index, double>> edge_coefficients;
};

ModifiedBubble modified_bubble(const Mesh& mesh, Index i, Index j);

}  // namespace thfortin
