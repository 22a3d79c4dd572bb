#include "thfortin/scott_zhang.hpp"

#include "thfortin/quadrature.hpp"

#include <map>
#include <stdexcept>

namespace thfortin {

namespace {

int find_local_dof(const std::vector<LocalDof>& dofs, Index global) {
  for (std::size_t l = 0; l < dofs.size(); ++l)
    if (dofs[l].global == global) return static_cast<int>(l);
  throw std::logic_error("ScottZhangOperator: dof not found on its own site cell");
}

}  // namespace

ScottZhangOperator::ScottZhangOperator(std::shared_ptr<const FunctionSpace> target)
    : target_(std::move(target)) {
  const SpaceKind kind = target_->kind();
  if (kind != SpaceKind::P2VectorFull && kind != SpaceKind::ReducedVelocityFull)
    throw std::invalid_argument(
        "ScottZhangOperator: target must be P2VectorFull or ReducedVelocityFull");
  const bool p2 = kind == SpaceKind::P2VectorFull;
  const Mesh& mesh = target_->mesh();
  const int d = mesh.dim;
  const Index nv = mesh.n_vertices();

  // Lowest-index boundary face containing each boundary vertex/edge. Faces
  // are lexicographically ordered, so the first hit wins.
  std::vector<Index> vertex_bface(nv, -1);
  std::vector<Index> edge_bface(mesh.n_edges(), -1);
  for (Index f = 0; f < mesh.n_faces(); ++f) {
    if (mesh.face_cells[f][1] >= 0) continue;
    const auto& fv = mesh.faces[f];
    for (Index v : fv)
      if (vertex_bface[v] < 0) vertex_bface[v] = f;
    for (std::size_t a = 0; a < fv.size(); ++a)
      for (std::size_t b = a + 1; b < fv.size(); ++b) {
        const Index e = mesh.find_edge(fv[a], fv[b]);
        if (e >= 0 && edge_bface[e] < 0) edge_bface[e] = f;
      }
  }

  sites_.resize(target_->dim());
  std::map<Index, int> cell_group_of, face_group_of;
  // (group, dof, target-local or face-local index, component)
  struct Pending {
    bool face = false;
    int group = -1;
    Index dof = -1;
    int local = -1;
    int comp = 0;
  };
  std::vector<Pending> pending;

  auto cell_group = [&](Index c) {
    auto it = cell_group_of.find(c);
    if (it != cell_group_of.end()) return it->second;
    CellGroup g;
    g.cell = c;
    cell_groups_.push_back(std::move(g));
    const int idx = static_cast<int>(cell_groups_.size()) - 1;
    cell_group_of.emplace(c, idx);
    return idx;
  };
  auto face_group = [&](Index f) {
    auto it = face_group_of.find(f);
    if (it != face_group_of.end()) return it->second;
    FaceGroup g;
    g.face = f;
    g.cell = mesh.face_cells[f][0];
    const auto& fv = mesh.faces[f];
    const auto& cv = mesh.cells[g.cell];
    for (Index v : fv) {
      int lv = -1;
      for (std::size_t l = 0; l < cv.size(); ++l)
        if (cv[l] == v) lv = static_cast<int>(l);
      if (lv < 0) throw std::logic_error("ScottZhangOperator: face vertex missing from its cell");
      g.cell_local_vertex.push_back(lv);
    }
    Eigen::MatrixXd pts(d, d);
    for (int a = 0; a < d; ++a) pts.col(a) = mesh.vertex(fv[a]);
    g.measure = simplex_measure(pts);
    face_groups_.push_back(std::move(g));
    const int idx = static_cast<int>(face_groups_.size()) - 1;
    face_group_of.emplace(f, idx);
    return idx;
  };
  auto face_vertex_local = [&](Index f, Index v) {
    const auto& fv = mesh.faces[f];
    for (std::size_t a = 0; a < fv.size(); ++a)
      if (fv[a] == v) return static_cast<int>(a);
    throw std::logic_error("ScottZhangOperator: vertex not on its assigned face");
  };
  auto face_edge_local = [&](Index f, Index e) {
    const auto& fv = mesh.faces[f];
    const int pa = face_vertex_local(f, mesh.edges[e][0]);
    const int pb = face_vertex_local(f, mesh.edges[e][1]);
    int k = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b, ++k)
        if (a == std::min(pa, pb) && b == std::max(pa, pb)) return d + k;
    throw std::logic_error("ScottZhangOperator: edge not on its assigned face");
  };

  for (Index v = 0; v < nv; ++v) {
    if (mesh.vertex_on_boundary[v]) {
      const Index f = vertex_bface[v];
      if (f < 0) throw std::logic_error("ScottZhangOperator: boundary vertex without boundary face");
      const int g = face_group(f);
      const int local = face_vertex_local(f, v);
      for (int k = 0; k < d; ++k) {
        const Index dof = d * v + k;
        sites_[dof] = Site{true, f};
        pending.push_back({true, g, dof, local, k});
      }
    } else {
      const Index c = mesh.vertex_cells[v].front();
      const int g = cell_group(c);
      for (int k = 0; k < d; ++k) {
        const Index dof = d * v + k;
        sites_[dof] = Site{false, c};
        pending.push_back({false, g, dof, find_local_dof(target_->cell_dofs(c), dof), k});
      }
    }
  }

  if (p2) {
    for (Index e = 0; e < mesh.n_edges(); ++e) {
      if (mesh.edge_on_boundary[e]) {
        const Index f = edge_bface[e];
        if (f < 0) throw std::logic_error("ScottZhangOperator: boundary edge without boundary face");
        const int g = face_group(f);
        const int local = face_edge_local(f, e);
        for (int k = 0; k < d; ++k) {
          const Index dof = d * nv + d * e + k;
          sites_[dof] = Site{true, f};
          pending.push_back({true, g, dof, local, k});
        }
      } else {
        const Index c = mesh.edge_cells[e].front();
        const int g = cell_group(c);
        for (int k = 0; k < d; ++k) {
          const Index dof = d * nv + d * e + k;
          sites_[dof] = Site{false, c};
          pending.push_back({false, g, dof, find_local_dof(target_->cell_dofs(c), dof), k});
        }
      }
    }
  } else {
    for (std::size_t s = 0; s < mesh.interior_edges.size(); ++s) {
      const Index e = mesh.interior_edges[s];
      const Index c = mesh.edge_cells[e].front();
      const int g = cell_group(c);
      const Index dof = d * nv + static_cast<Index>(s);
      sites_[dof] = Site{false, c};
      pending.push_back({false, g, dof, find_local_dof(target_->cell_dofs(c), dof), 0});
    }
  }

  // Local Gram matrices and their dual rows. Cell sites use the vector-valued
  // Gram of all target functions on the cell; face sites the scalar Gram of
  // the trace basis.
  const int mass_degree = 2 * target_->max_poly_degree();
  std::vector<Eigen::MatrixXd> cell_minv(cell_groups_.size());
  {
    const QuadratureRule rule = simplex_rule(d, mass_degree);
    Eigen::MatrixXd values;
    std::vector<Eigen::MatrixXd> grads;
    for (std::size_t g = 0; g < cell_groups_.size(); ++g) {
      const Index c = cell_groups_[g].cell;
      const CellGeometry geo = cell_geometry(mesh, c);
      const int n = static_cast<int>(target_->cell_dofs(c).size());
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      for (int q = 0; q < rule.points.cols(); ++q) {
        target_->eval_local(c, geo, rule.points.col(q), values, grads, false);
        m.noalias() += rule.weights[q] * geo.volume * values.transpose() * values;
      }
      cell_minv[g] = m.llt().solve(Eigen::MatrixXd::Identity(n, n));
    }
  }
  std::vector<Eigen::MatrixXd> face_minv(face_groups_.size());
  {
    const QuadratureRule rule = simplex_rule(d - 1, mass_degree);
    const int n = face_basis_size();
    for (std::size_t g = 0; g < face_groups_.size(); ++g) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      for (int q = 0; q < rule.points.cols(); ++q) {
        const Eigen::VectorXd fb = face_basis(rule.points.col(q));
        m.noalias() += rule.weights[q] * face_groups_[g].measure * fb * fb.transpose();
      }
      face_minv[g] = m.llt().solve(Eigen::MatrixXd::Identity(n, n));
    }
  }

  for (const Pending& p : pending) {
    if (p.face) {
      FaceDual fd;
      fd.dof = p.dof;
      fd.comp = p.comp;
      fd.dual = face_minv[p.group].row(p.local);
      face_groups_[p.group].duals.push_back(std::move(fd));
    } else {
      CellDual cd;
      cd.dof = p.dof;
      cd.dual = cell_minv[p.group].row(p.local);
      cell_groups_[p.group].duals.push_back(std::move(cd));
    }
  }
}

int ScottZhangOperator::face_basis_size() const {
  const int d = target_->mesh().dim;
  return target_->kind() == SpaceKind::P2VectorFull ? d + d * (d - 1) / 2 : d;
}

Eigen::VectorXd ScottZhangOperator::face_basis(const Eigen::VectorXd& mu) const {
  const int d = target_->mesh().dim;
  if (target_->kind() != SpaceKind::P2VectorFull) return mu;
  Eigen::VectorXd out(face_basis_size());
  for (int a = 0; a < d; ++a) out[a] = mu[a] * (2.0 * mu[a] - 1.0);
  int k = d;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b, ++k) out[k] = 4.0 * mu[a] * mu[b];
  return out;
}

int ScottZhangOperator::resolve_degree(const Field& v, int quad_degree) const {
  if (quad_degree >= 0) return quad_degree;
  if (const auto* dv = dynamic_cast<const DiscreteField*>(&v))
    return target_->max_poly_degree() + dv->space().max_poly_degree();
  throw std::invalid_argument(
      "ScottZhangOperator: a quadrature degree is required for non-discrete fields");
}

Eigen::VectorXd ScottZhangOperator::apply(const Field& v, int quad_degree) const {
  const Mesh& mesh = target_->mesh();
  const int d = mesh.dim;
  if (v.value_dim() != d)
    throw std::invalid_argument("ScottZhangOperator::apply: field has wrong value dimension");
  const int degree = resolve_degree(v, quad_degree);

  Eigen::VectorXd out = Eigen::VectorXd::Zero(target_->dim());

  const QuadratureRule cell_rule = simplex_rule(d, degree);
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
  for (const CellGroup& g : cell_groups_) {
    const CellGeometry geo = cell_geometry(mesh, g.cell);
    for (int q = 0; q < cell_rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = cell_rule.points.col(q);
      const Eigen::VectorXd x = geo.point(lambda);
      target_->eval_local(g.cell, geo, lambda, values, grads, false);
      const Eigen::VectorXd t = values.transpose() * v.value(g.cell, geo, lambda, x);
      const double w = cell_rule.weights[q] * geo.volume;
      for (const CellDual& cd : g.duals) out[cd.dof] += w * cd.dual.dot(t);
    }
  }

  const QuadratureRule face_rule = simplex_rule(d - 1, degree);
  for (const FaceGroup& g : face_groups_) {
    const CellGeometry geo = cell_geometry(mesh, g.cell);
    Eigen::VectorXd lambda(d + 1);
    for (int q = 0; q < face_rule.points.cols(); ++q) {
      const Eigen::VectorXd mu = face_rule.points.col(q);
      lambda.setZero();
      for (int a = 0; a < d; ++a) lambda[g.cell_local_vertex[a]] = mu[a];
      const Eigen::VectorXd x = geo.point(lambda);
      const Eigen::VectorXd fb = face_basis(mu);
      const Eigen::VectorXd vv = v.value(g.cell, geo, lambda, x);
      const double w = face_rule.weights[q] * g.measure;
      for (const FaceDual& fd : g.duals) out[fd.dof] += w * fd.dual.dot(fb) * vv[fd.comp];
    }
  }
  return out;
}

Eigen::SparseMatrix<double> ScottZhangOperator::matrix(const FunctionSpace& input,
                                                       int quad_degree) const {
  const Mesh& mesh = target_->mesh();
  const int d = mesh.dim;
  if (input.mesh_ptr().get() != target_->mesh_ptr().get())
    throw std::invalid_argument("ScottZhangOperator::matrix: input space lives on another mesh");
  if (input.value_dim() != d)
    throw std::invalid_argument("ScottZhangOperator::matrix: input space is not vector valued");
  const int degree =
      quad_degree >= 0 ? quad_degree : target_->max_poly_degree() + input.max_poly_degree();

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::MatrixXd values_t, values_i;
  std::vector<Eigen::MatrixXd> grads;

  const QuadratureRule cell_rule = simplex_rule(d, degree);
  for (const CellGroup& g : cell_groups_) {
    const CellGeometry geo = cell_geometry(mesh, g.cell);
    const auto& in_dofs = input.cell_dofs(g.cell);
    const int ni = static_cast<int>(in_dofs.size());
    if (ni == 0) continue;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<int>(g.duals.size()), ni);
    for (int q = 0; q < cell_rule.points.cols(); ++q) {
      const Eigen::VectorXd lambda = cell_rule.points.col(q);
      target_->eval_local(g.cell, geo, lambda, values_t, grads, false);
      input.eval_local(g.cell, geo, lambda, values_i, grads, false);
      const Eigen::MatrixXd t = values_t.transpose() * values_i;
      const double w = cell_rule.weights[q] * geo.volume;
      for (std::size_t r = 0; r < g.duals.size(); ++r)
        block.row(static_cast<int>(r)) += w * g.duals[r].dual.transpose() * t;
    }
    for (std::size_t r = 0; r < g.duals.size(); ++r)
      for (int j = 0; j < ni; ++j)
        if (block(static_cast<int>(r), j) != 0.0)
          triplets.emplace_back(g.duals[r].dof, in_dofs[j].global, block(static_cast<int>(r), j));
  }

  const QuadratureRule face_rule = simplex_rule(d - 1, degree);
  for (const FaceGroup& g : face_groups_) {
    const CellGeometry geo = cell_geometry(mesh, g.cell);
    const auto& in_dofs = input.cell_dofs(g.cell);
    const int ni = static_cast<int>(in_dofs.size());
    if (ni == 0) continue;
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<int>(g.duals.size()), ni);
    Eigen::VectorXd lambda(d + 1);
    for (int q = 0; q < face_rule.points.cols(); ++q) {
      const Eigen::VectorXd mu = face_rule.points.col(q);
      lambda.setZero();
      for (int a = 0; a < d; ++a) lambda[g.cell_local_vertex[a]] = mu[a];
      input.eval_local(g.cell, geo, lambda, values_i, grads, false);
      const Eigen::VectorXd fb = face_basis(mu);
      const double w = face_rule.weights[q] * g.measure;
      for (std::size_t r = 0; r < g.duals.size(); ++r)
        block.row(static_cast<int>(r)) +=
            w * g.duals[r].dual.dot(fb) * values_i.row(g.duals[r].comp);
    }
    for (std::size_t r = 0; r < g.duals.size(); ++r)
      for (int j = 0; j < ni; ++j)
        if (block(static_cast<int>(r), j) != 0.0)
          triplets.emplace_back(g.duals[r].dof, in_dofs[j].global, block(static_cast<int>(r), j));
  }

  Eigen::SparseMatrix<double> out(target_->dim(), input.dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

}  // namespace thfortin
