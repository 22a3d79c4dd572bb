#pragma once

#include "thfortin/mesh.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace thfortin {

/// Discrete spaces on a simplicial mesh. "ZeroTrace" spaces carry DOFs only
/// on interior entities, so every member function vanishes on the boundary.
/// The two pressure representations P1Scalar/P1Pressure are identical apart
/// from the tag; AugmentedPressure is the (redundant) P1-nodal plus
/// P0-indicator representation whose mass-matrix null space is removed
/// downstream by the inf-sup solver.
enum class SpaceKind {
  P1Scalar,
  P1Pressure,
  P0Scalar,
  AugmentedPressure,
  P1VectorZeroTrace,
  P2VectorZeroTrace,         ///< quadratic velocity space V_h
  P2VectorFull,              ///< quadratic vectors without boundary conditions
  EdgeBubble,                ///< E_h: one normalized tangential bubble per interior edge
  ReducedVelocityZeroTrace,  ///< V_h^-: P1 vectors + tangential bubbles
  ReducedVelocityFull,
};

bool is_vector_kind(SpaceKind kind);
bool is_zero_trace_kind(SpaceKind kind);
std::string space_kind_name(SpaceKind kind);

/// One basis function restricted to a cell.
///
/// Shapes: p1_vertex = barycentric coordinate lambda_a; p2_vertex =
/// lambda_a (2 lambda_a - 1); p2_edge = 4 lambda_a lambda_b; bubble =
/// factor * lambda_a lambda_b (x_b - x_a) (a vector field along the edge);
/// cell_const = 1. Scalar shapes with comp >= 0 act on that component of a
/// vector space. For EdgeBubble the factor is the normalization
/// (2+d)! / (d! |patch|), which makes <div b_e, hat_i> = +-1 at the edge
/// endpoints; ReducedVelocity bubbles keep factor 1.
struct LocalDof {
  enum class Shape : std::uint8_t { p1_vertex, p2_vertex, p2_edge, bubble, cell_const };
  Index global = -1;
  Shape shape = Shape::p1_vertex;
  std::int8_t a = -1;
  std::int8_t b = -1;
  std::int8_t comp = -1;
  double factor = 1.0;
};

class FunctionSpace {
 public:
  FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  SpaceKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  int value_dim() const { return value_dim_; }
  int max_poly_degree() const { return max_degree_; }

  const std::vector<LocalDof>& cell_dofs(Index cell) const { return cell_dofs_[cell]; }

  /// Values (value_dim x nloc) and per-dof gradients (value_dim x dim) of all
  /// local basis functions at one barycentric point.
  void eval_local(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                  Eigen::MatrixXd& values, std::vector<Eigen::MatrixXd>& grads,
                  bool want_grads = true) const;

  /// Normalization factor of the EdgeBubble basis function on interior edge e.
  double bubble_scale(Index edge) const;

  /// Global DOF ids of vertex v (empty if the space has none there).
  std::vector<Index> vertex_dofs(Index v) const;
  /// Global DOF ids attached to boundary entities (empty for zero-trace kinds).
  std::vector<Index> boundary_dofs() const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  SpaceKind kind_;
  Index dim_ = 0;
  int value_dim_ = 1;
  int max_degree_ = 1;
  std::vector<std::vector<LocalDof>> cell_dofs_;
  std::vector<double> edge_patch_measure_;  ///< per edge, only filled when bubbles exist
};

std::shared_ptr<const FunctionSpace> make_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind);

}  // namespace thfortin
