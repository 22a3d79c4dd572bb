#pragma once

#include "thfortin/field.hpp"
#include "thfortin/quadrature.hpp"
#include "thfortin/spaces.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <string>

namespace thfortin {

enum class OperatorTag { mass, stiffness, divergence };

struct AssembledOperator {
  OperatorTag tag;
  std::shared_ptr<const FunctionSpace> rows;
  std::shared_ptr<const FunctionSpace> cols;
  Eigen::SparseMatrix<double> matrix;
};

/// Galerkin matrix of the tag's bilinear form. mass = <phi_i, phi_j>,
/// stiffness = <grad phi_i, grad phi_j> (Frobenius), divergence =
/// <div phi_j, chi_i> with pressure rows and velocity columns. The default
/// quadrature degree is the exact polynomial degree of the integrand; pass
/// quad_degree to override.
AssembledOperator assemble_operator(OperatorTag tag, std::shared_ptr<const FunctionSpace> rows,
                                    std::shared_ptr<const FunctionSpace> cols,
                                    int quad_degree = -1);

/// Integral of a . b over the whole mesh at the given quadrature degree.
double integrate_pairing(const Mesh& mesh, const Field& a, const Field& b, int quad_degree);

/// Integral of div(v) * q; v must be vector valued with a gradient.
double integrate_div_pairing(const Mesh& mesh, const Field& v, const Field& q, int quad_degree);

struct ErrorNorms {
  double l2 = 0;
  double h1_semi = 0;
};

/// || a - b ||_{L2} and | a - b |_{H1} by quadrature of the given degree.
/// The seminorm is skipped (left 0) unless both fields provide gradients and
/// with_gradient is true.
ErrorNorms error_norms(const Mesh& mesh, const Field& a, const Field& b, int quad_degree,
                       bool with_gradient = true);

/// Coordinate-format MatrixMarket file ("%%MatrixMarket matrix coordinate
/// real general", 1-based indices).
void write_matrix_market(const Eigen::SparseMatrix<double>& matrix, const std::string& path);

}  // namespace thfortin
