#pragma once

#include <Eigen/Dense>

namespace thfortin {

/// Quadrature rule on the reference simplex, stored in barycentric
/// coordinates. Weights are normalized to sum to 1, so an integral over a
/// physical cell T is |T| * sum_q w_q f(x_q).
struct QuadratureRule {
  int dim = 0;
  int exactness = 0;        ///< all polynomials up to this total degree are exact
  Eigen::MatrixXd points;   ///< (dim+1) x n_points, columns are barycentric
  Eigen::VectorXd weights;  ///< n_points, sums to 1 (entries may be negative)

  int n_points() const { return static_cast<int>(points.cols()); }
};

/// Grundmann-Moller simplex rule of odd exactness >= degree, for any dim >= 1.
/// Throws if degree exceeds the supported maximum (13) with a message that
/// states the maximum.
QuadratureRule simplex_rule(int dim, int degree);

constexpr int kMaxQuadratureDegree = 13;

}  // namespace thfortin
