#pragma once

#include "thfortin/div_correction.hpp"
#include "thfortin/scott_zhang.hpp"

#include <memory>

namespace thfortin {

/// Coefficient embedding of a zero-trace space into its full-space sibling
/// (full.dim x zt.dim, one unit entry per column). The transpose restricts.
Eigen::SparseMatrix<double> zero_trace_embedding(const FunctionSpace& zero_trace,
                                                 const FunctionSpace& full);

/// Coefficient embedding of the normalized edge bubbles into P2VectorFull
/// (midpoint DOFs scale * (x_j - x_i) / 4) or ReducedVelocityFull (bubble
/// slot gets the normalization factor).
Eigen::SparseMatrix<double> bubble_embedding(const FunctionSpace& bubbles,
                                             const FunctionSpace& target);

/// Coefficient embedding ReducedVelocityFull -> P2VectorFull: P1 hats get 1
/// at their vertex and 1/2 at the midpoints of incident edges; raw bubbles
/// get (x_j - x_i) / 4 at their midpoint.
Eigen::SparseMatrix<double> reduced_to_p2_embedding(const FunctionSpace& reduced,
                                                    const FunctionSpace& p2);

/// The composed Fortin operator Pi v = Pi_1 v + Pi_2 (v - Pi_1 v) with Pi_1
/// the trace-preserving quasi-interpolation and Pi_2 the divergence
/// correction. Variant taylor_hood targets the quadratic space itself;
/// variant reduced targets the P1-plus-bubble space. Construction throws on
/// meshes with a cell all of whose vertices lie on the boundary (the
/// correction's boundary-edge relays need an interior vertex there).
class FortinOperator {
 public:
  enum class Variant { taylor_hood, reduced };

  FortinOperator(std::shared_ptr<const Mesh> mesh, Variant variant);

  Variant variant() const { return variant_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const std::shared_ptr<const FunctionSpace>& input_space() const { return input_; }
  const std::shared_ptr<const FunctionSpace>& target_space() const { return target_; }
  const std::shared_ptr<const FunctionSpace>& input_zero_trace_space() const { return input_zt_; }
  const std::shared_ptr<const FunctionSpace>& target_zero_trace_space() const { return target_zt_; }
  const ScottZhangOperator& smoothing() const { return *smoothing_; }
  const DivergenceCorrection& correction() const { return *correction_; }

  /// Target-space coefficients of Pi v. quad_degree -1 picks the exact
  /// degrees for discrete v and throws for other fields.
  Eigen::VectorXd apply(const Field& v, int quad_degree = -1) const;

  /// Matrix on the full quadratic input space (rows: target, cols: input).
  Eigen::SparseMatrix<double> matrix(int quad_degree = -1) const;
  /// Matrix between the zero-trace coefficient spaces.
  Eigen::SparseMatrix<double> zero_trace_matrix(int quad_degree = -1) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Variant variant_;
  std::shared_ptr<const FunctionSpace> input_;      ///< P2VectorFull
  std::shared_ptr<const FunctionSpace> target_;     ///< P2VectorFull or ReducedVelocityFull
  std::shared_ptr<const FunctionSpace> input_zt_;   ///< P2VectorZeroTrace
  std::shared_ptr<const FunctionSpace> target_zt_;  ///< zero-trace sibling of target_
  std::shared_ptr<const FunctionSpace> bubbles_;    ///< EdgeBubble
  std::unique_ptr<ScottZhangOperator> smoothing_;
  std::unique_ptr<DivergenceCorrection> correction_;
  Eigen::SparseMatrix<double> bubble_embed_;        ///< bubbles -> target
};

}  // namespace thfortin
