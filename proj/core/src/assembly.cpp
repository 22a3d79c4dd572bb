#include "thfortin/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace thfortin {

namespace {

int default_degree(OperatorTag tag, const FunctionSpace& rows, const FunctionSpace& cols) {
  const int dr = rows.max_poly_degree();
  const int dc = cols.max_poly_degree();
  switch (tag) {
    case OperatorTag::mass:
      return dr + dc;
    case OperatorTag::stiffness:
      return std::max(dr - 1, 0) + std::max(dc - 1, 0);
    case OperatorTag::divergence:
      return dr + std::max(dc - 1, 0);
  }
  return dr + dc;
}

}  // namespace

AssembledOperator assemble_operator(OperatorTag tag, std::shared_ptr<const FunctionSpace> rows,
                                    std::shared_ptr<const FunctionSpace> cols, int quad_degree) {
  if (!rows || !cols) throw std::invalid_argument("assemble_operator: null space");
  if (rows->mesh_ptr().get() != cols->mesh_ptr().get())
    throw std::invalid_argument("assemble_operator: spaces live on different meshes");
  const Mesh& mesh = rows->mesh();

  switch (tag) {
    case OperatorTag::mass:
    case OperatorTag::stiffness:
      if (rows->value_dim() != cols->value_dim())
        throw std::invalid_argument("assemble_operator: value dimensions differ");
      break;
    case OperatorTag::divergence:
      if (rows->value_dim() != 1 || cols->value_dim() != mesh.dim)
        throw std::invalid_argument(
            "assemble_operator: divergence needs scalar rows and vector columns");
      break;
  }

  const int degree = quad_degree >= 0 ? quad_degree : default_degree(tag, *rows, *cols);
  const QuadratureRule rule = simplex_rule(mesh.dim, degree);
  const bool need_row_grads = tag == OperatorTag::stiffness;
  const bool need_col_grads = tag != OperatorTag::mass;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd vals_r, vals_c, local;
  std::vector<Eigen::MatrixXd> grads_r, grads_c;

  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    const auto& dofs_r = rows->cell_dofs(c);
    const auto& dofs_c = cols->cell_dofs(c);
    const int nr = static_cast<int>(dofs_r.size());
    const int nc = static_cast<int>(dofs_c.size());
    if (nr == 0 || nc == 0) continue;
    local.setZero(nr, nc);

    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      rows->eval_local(c, geo, lambda, vals_r, grads_r, need_row_grads);
      cols->eval_local(c, geo, lambda, vals_c, grads_c, need_col_grads);
      const double w = rule.weights[q] * geo.volume;
      switch (tag) {
        case OperatorTag::mass:
          local.noalias() += w * vals_r.transpose() * vals_c;
          break;
        case OperatorTag::stiffness:
          for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j)
              local(i, j) += w * grads_r[i].cwiseProduct(grads_c[j]).sum();
          break;
        case OperatorTag::divergence:
          for (int j = 0; j < nc; ++j) {
            const double dv = grads_c[j].trace();
            for (int i = 0; i < nr; ++i) local(i, j) += w * vals_r(0, i) * dv;
          }
          break;
      }
    }

    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nc; ++j)
        if (local(i, j) != 0.0) triplets.emplace_back(dofs_r[i].global, dofs_c[j].global, local(i, j));
  }

  AssembledOperator out;
  out.tag = tag;
  out.rows = rows;
  out.cols = cols;
  out.matrix.resize(rows->dim(), cols->dim());
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

double integrate_pairing(const Mesh& mesh, const Field& a, const Field& b, int quad_degree) {
  if (a.value_dim() != b.value_dim())
    throw std::invalid_argument("integrate_pairing: value dimensions differ");
  const QuadratureRule rule = simplex_rule(mesh.dim, quad_degree);
  double sum = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      const Eigen::VectorXd x = geo.point(lambda);
      sum += rule.weights[q] * geo.volume * a.value(c, geo, lambda, x).dot(b.value(c, geo, lambda, x));
    }
  }
  return sum;
}

double integrate_div_pairing(const Mesh& mesh, const Field& v, const Field& q, int quad_degree) {
  if (v.value_dim() != mesh.dim || q.value_dim() != 1)
    throw std::invalid_argument("integrate_div_pairing: needs a vector field and a scalar field");
  const QuadratureRule rule = simplex_rule(mesh.dim, quad_degree);
  double sum = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    for (int k = 0; k < rule.points.cols(); ++k) {
      const Eigen::VectorXd lambda = rule.points.col(k);
      const Eigen::VectorXd x = geo.point(lambda);
      sum += rule.weights[k] * geo.volume * v.divergence(c, geo, lambda, x) *
             q.value(c, geo, lambda, x)[0];
    }
  }
  return sum;
}

ErrorNorms error_norms(const Mesh& mesh, const Field& a, const Field& b, int quad_degree,
                       bool with_gradient) {
  if (a.value_dim() != b.value_dim())
    throw std::invalid_argument("error_norms: value dimensions differ");
  const bool grads = with_gradient && a.has_gradient() && b.has_gradient();
  const QuadratureRule rule = simplex_rule(mesh.dim, quad_degree);
  double l2 = 0.0, h1 = 0.0;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const CellGeometry geo = cell_geometry(mesh, c);
    for (int q = 0; q < rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = rule.points.col(q);
      const Eigen::VectorXd x = geo.point(lambda);
      const double w = rule.weights[q] * geo.volume;
      l2 += w * (a.value(c, geo, lambda, x) - b.value(c, geo, lambda, x)).squaredNorm();
      if (grads)
        h1 += w * (a.gradient(c, geo, lambda, x) - b.gradient(c, geo, lambda, x)).squaredNorm();
    }
  }
  ErrorNorms out;
  out.l2 = std::sqrt(std::max(l2, 0.0));
  out.h1_semi = std::sqrt(std::max(h1, 0.0));
  return out;
}

void write_matrix_market(const Eigen::SparseMatrix<double>& matrix, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_matrix_market: cannot open " + path);
  f << "%%MatrixMarket matrix coordinate real general\n";
  f << matrix.rows() << " " << matrix.cols() << " " << matrix.nonZeros() << "\n";
  char buf[64];
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", static_cast<int>(it.row()) + 1,
                    static_cast<int>(it.col()) + 1, it.value());
      f << buf;
    }
  if (!f) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

}  // namespace thfortin
