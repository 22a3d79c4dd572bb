#pragma once

#include "thfortin/bubbles.hpp"
#include "thfortin/field.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace thfortin {

/// The divergence-correcting operator: v is mapped to the combination of
/// interior-edge bubbles whose divergence has the same P1 moments as div v
/// (exactly, for zero-trace v, up to the quadrature used for the edge
/// weights). Per edge [i < j] the weight is
///   c_e = <v, hat_j grad hat_i - hat_i grad hat_j>
/// and the output is sum_e c_e psi_{j,i} with psi the divergence-unit bubble
/// of modified_bubble(). Constructing the operator resolves every boundary
/// edge's relay vertex, so it throws on meshes where a boundary edge has no
/// interior vertex nearby.
class DivergenceCorrection {
 public:
  explicit DivergenceCorrection(std::shared_ptr<const FunctionSpace> bubbles);

  const FunctionSpace& bubble_space() const { return *bubbles_; }
  const std::shared_ptr<const FunctionSpace>& bubble_space_ptr() const { return bubbles_; }

  /// Edge-bubble coefficients of the corrected field. quad_degree -1 uses
  /// deg(v) + 1 for discrete fields and throws otherwise. reversed_edges
  /// (size n_edges) flips the internal orientation convention of selected
  /// edges; the result must not depend on it.
  Eigen::VectorXd apply(const Field& v, int quad_degree = -1,
                        const std::vector<bool>* reversed_edges = nullptr) const;

  /// Same operator accumulated per node: sum_i sum_{j ~ i} w_ij psi_{j,i}
  /// with w_ij = -<hat_i v, grad hat_j>.
  Eigen::VectorXd apply_per_node(const Field& v, int quad_degree = -1) const;

  /// Per-edge weights c_e for all canonical edges.
  Eigen::VectorXd edge_weights(const Field& v, int quad_degree,
                               const std::vector<bool>* reversed_edges = nullptr) const;

  /// Matrix of the operator on a discrete input space (rows: edge bubbles,
  /// cols: input DOFs). quad_degree -1 uses deg(input) + 1.
  Eigen::SparseMatrix<double> matrix(const FunctionSpace& input, int quad_degree = -1) const;

  /// Column e = edge-bubble coefficients of psi_{j,i} for canonical edge
  /// [i < j]; the operator is psi_map * edge_weights.
  const Eigen::SparseMatrix<double>& psi_map() const { return psi_map_; }

 private:
  int resolve_degree(const Field& v, int quad_degree) const;

  std::shared_ptr<const FunctionSpace> bubbles_;
  Eigen::SparseMatrix<double> psi_map_;  ///< n_interior_edges x n_edges
};

}  // namespace thfortin
