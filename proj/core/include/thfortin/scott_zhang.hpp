#pragma once

#include "thfortin/field.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <vector>

namespace thfortin {

/// Trace-preserving quasi-interpolation onto P2VectorFull or
/// ReducedVelocityFull. Every target DOF gets an averaging site: DOFs of
/// boundary entities integrate against a dual basis on the lowest-index
/// boundary face containing the entity, all others on the lowest-index
/// incident cell. Duals are rows of the inverse local Gram matrix of the
/// functions of the target space alive on the site, which makes the operator
/// a projection; because boundary DOFs only see the trace, two fields with
/// equal boundary values get identical boundary coefficients, and a
/// zero-trace field gets exactly zero ones.
class ScottZhangOperator {
 public:
  explicit ScottZhangOperator(std::shared_ptr<const FunctionSpace> target);

  const FunctionSpace& target() const { return *target_; }
  const std::shared_ptr<const FunctionSpace>& target_ptr() const { return target_; }

  /// Target coefficients of the quasi-interpolant. quad_degree -1 uses
  /// deg(target) + deg(v) for discrete v and throws for other fields.
  Eigen::VectorXd apply(const Field& v, int quad_degree = -1) const;

  /// Matrix over a discrete input space on the same mesh (rows: target DOFs,
  /// cols: input DOFs).
  Eigen::SparseMatrix<double> matrix(const FunctionSpace& input, int quad_degree = -1) const;

  struct Site {
    bool on_boundary = false;
    Index entity = -1;  ///< face id when on_boundary, else cell id
  };
  const std::vector<Site>& sites() const { return sites_; }

 private:
  struct CellDual {
    Index dof = -1;
    Eigen::VectorXd dual;  ///< over target cell_dofs of the group's cell
  };
  struct CellGroup {
    Index cell = -1;
    std::vector<CellDual> duals;
  };
  struct FaceDual {
    Index dof = -1;
    int comp = 0;
    Eigen::VectorXd dual;  ///< over the face trace basis
  };
  struct FaceGroup {
    Index face = -1;
    Index cell = -1;                     ///< the cell the face belongs to
    std::vector<int> cell_local_vertex;  ///< face-local -> cell-local vertex index
    double measure = 0;
    std::vector<FaceDual> duals;
  };

  int resolve_degree(const Field& v, int quad_degree) const;
  /// Face trace basis at barycentric mu: P2 (vertices then vertex pairs in
  /// (0,1),(0,2),... order) or P1 depending on the target kind.
  Eigen::VectorXd face_basis(const Eigen::VectorXd& mu) const;
  int face_basis_size() const;

  std::shared_ptr<const FunctionSpace> target_;
  std::vector<Site> sites_;
  std::vector<CellGroup> cell_groups_;
  std::vector<FaceGroup> face_groups_;
};

}  // namespace thfortin
