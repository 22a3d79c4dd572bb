#include "thfortin/spaces.hpp"

#include <stdexcept>

namespace thfortin {

bool is_vector_kind(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1VectorZeroTrace:
    case SpaceKind::P2VectorZeroTrace:
    case SpaceKind::P2VectorFull:
    case SpaceKind::EdgeBubble:
    case SpaceKind::ReducedVelocityZeroTrace:
    case SpaceKind::ReducedVelocityFull:
      return true;
    default:
      return false;
  }
}

bool is_zero_trace_kind(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1VectorZeroTrace:
    case SpaceKind::P2VectorZeroTrace:
    case SpaceKind::EdgeBubble:
    case SpaceKind::ReducedVelocityZeroTrace:
      return true;
    default:
      return false;
  }
}

std::string space_kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::P1Scalar: return "p1_scalar";
    case SpaceKind::P1Pressure: return "p1_pressure";
    case SpaceKind::P0Scalar: return "p0_scalar";
    case SpaceKind::AugmentedPressure: return "augmented_pressure";
    case SpaceKind::P1VectorZeroTrace: return "p1_vector_zero_trace";
    case SpaceKind::P2VectorZeroTrace: return "p2_vector_zero_trace";
    case SpaceKind::P2VectorFull: return "p2_vector_full";
    case SpaceKind::EdgeBubble: return "edge_bubble";
    case SpaceKind::ReducedVelocityZeroTrace: return "reduced_velocity_zero_trace";
    case SpaceKind::ReducedVelocityFull: return "reduced_velocity_full";
  }
  return "unknown";
}

namespace {

bool has_bubbles(SpaceKind kind) {
  return kind == SpaceKind::EdgeBubble || kind == SpaceKind::ReducedVelocityZeroTrace ||
         kind == SpaceKind::ReducedVelocityFull;
}

}  // namespace

FunctionSpace::FunctionSpace(std::shared_ptr<const Mesh> mesh, SpaceKind kind)
    : mesh_(std::move(mesh)), kind_(kind) {
  const Mesh& m = *mesh_;
  const int d = m.dim;
  const Index nv = m.n_vertices();
  const Index ne = m.n_edges();
  const Index nc = m.n_cells();
  const Index niv = static_cast<Index>(m.interior_vertices.size());
  const Index nie = static_cast<Index>(m.interior_edges.size());

  value_dim_ = is_vector_kind(kind_) ? d : 1;

  switch (kind_) {
    case SpaceKind::P1Scalar:
    case SpaceKind::P1Pressure:
      dim_ = nv;
      max_degree_ = 1;
      break;
    case SpaceKind::P0Scalar:
      dim_ = nc;
      max_degree_ = 0;
      break;
    case SpaceKind::AugmentedPressure:
      dim_ = nv + nc;
      max_degree_ = 1;
      break;
    case SpaceKind::P1VectorZeroTrace:
      dim_ = d * niv;
      max_degree_ = 1;
      break;
    case SpaceKind::P2VectorZeroTrace:
      dim_ = d * (niv + nie);
      max_degree_ = 2;
      break;
    case SpaceKind::P2VectorFull:
      dim_ = d * (nv + ne);
      max_degree_ = 2;
      break;
    case SpaceKind::EdgeBubble:
      dim_ = nie;
      max_degree_ = 2;
      break;
    case SpaceKind::ReducedVelocityZeroTrace:
      dim_ = d * niv + nie;
      max_degree_ = 2;
      break;
    case SpaceKind::ReducedVelocityFull:
      dim_ = d * nv + nie;
      max_degree_ = 2;
      break;
  }

  if (has_bubbles(kind_)) {
    edge_patch_measure_.assign(ne, 0.0);
    for (Index e = 0; e < ne; ++e) {
      double vol = 0.0;
      for (Index c : m.edge_cells[e]) vol += m.cell_volumes[c];
      edge_patch_measure_[e] = vol;
    }
  }

  cell_dofs_.resize(nc);
  const int nlv = d + 1;
  for (Index c = 0; c < nc; ++c) {
    std::vector<LocalDof>& dofs = cell_dofs_[c];
    const auto& cv = m.cells[c];

    auto add_vertex_scalar = [&](LocalDof::Shape shape, int lv, Index global) {
      LocalDof ld;
      ld.global = global;
      ld.shape = shape;
      ld.a = static_cast<std::int8_t>(lv);
      dofs.push_back(ld);
    };
    auto add_vertex_vector = [&](LocalDof::Shape shape, int lv, Index base) {
      for (int k = 0; k < d; ++k) {
        LocalDof ld;
        ld.global = base + k;
        ld.shape = shape;
        ld.a = static_cast<std::int8_t>(lv);
        ld.comp = static_cast<std::int8_t>(k);
        dofs.push_back(ld);
      }
    };
    auto add_edge_vector = [&](int la, int lb, Index base) {
      for (int k = 0; k < d; ++k) {
        LocalDof ld;
        ld.global = base + k;
        ld.shape = LocalDof::Shape::p2_edge;
        ld.a = static_cast<std::int8_t>(la);
        ld.b = static_cast<std::int8_t>(lb);
        ld.comp = static_cast<std::int8_t>(k);
        dofs.push_back(ld);
      }
    };
    auto add_bubble = [&](int la, int lb, Index global, double factor) {
      LocalDof ld;
      ld.global = global;
      ld.shape = LocalDof::Shape::bubble;
      ld.a = static_cast<std::int8_t>(la);
      ld.b = static_cast<std::int8_t>(lb);
      ld.factor = factor;
      dofs.push_back(ld);
    };

    switch (kind_) {
      case SpaceKind::P1Scalar:
      case SpaceKind::P1Pressure:
        for (int lv = 0; lv < nlv; ++lv)
          add_vertex_scalar(LocalDof::Shape::p1_vertex, lv, cv[lv]);
        break;
      case SpaceKind::P0Scalar: {
        LocalDof ld;
        ld.global = c;
        ld.shape = LocalDof::Shape::cell_const;
        dofs.push_back(ld);
        break;
      }
      case SpaceKind::AugmentedPressure: {
        for (int lv = 0; lv < nlv; ++lv)
          add_vertex_scalar(LocalDof::Shape::p1_vertex, lv, cv[lv]);
        LocalDof ld;
        ld.global = nv + c;
        ld.shape = LocalDof::Shape::cell_const;
        dofs.push_back(ld);
        break;
      }
      case SpaceKind::P1VectorZeroTrace:
        for (int lv = 0; lv < nlv; ++lv) {
          const Index slot = m.vertex_interior_slot[cv[lv]];
          if (slot >= 0) add_vertex_vector(LocalDof::Shape::p1_vertex, lv, d * slot);
        }
        break;
      case SpaceKind::P2VectorZeroTrace: {
        for (int lv = 0; lv < nlv; ++lv) {
          const Index slot = m.vertex_interior_slot[cv[lv]];
          if (slot >= 0) add_vertex_vector(LocalDof::Shape::p2_vertex, lv, d * slot);
        }
        const Index edge_base = d * niv;
        const auto& ces = m.cell_edges[c];
        for (std::size_t le = 0; le < ces.size(); ++le) {
          const Index slot = m.edge_interior_slot[ces[le]];
          if (slot < 0) continue;
          const auto [la, lb] = local_edge_vertices(d, static_cast<int>(le));
          add_edge_vector(la, lb, edge_base + d * slot);
        }
        break;
      }
      case SpaceKind::P2VectorFull: {
        for (int lv = 0; lv < nlv; ++lv)
          add_vertex_vector(LocalDof::Shape::p2_vertex, lv, d * cv[lv]);
        const Index edge_base = d * nv;
        const auto& ces = m.cell_edges[c];
        for (std::size_t le = 0; le < ces.size(); ++le) {
          const auto [la, lb] = local_edge_vertices(d, static_cast<int>(le));
          add_edge_vector(la, lb, edge_base + d * ces[le]);
        }
        break;
      }
      case SpaceKind::EdgeBubble: {
        const auto& ces = m.cell_edges[c];
        for (std::size_t le = 0; le < ces.size(); ++le) {
          const Index slot = m.edge_interior_slot[ces[le]];
          if (slot < 0) continue;
          const auto [la, lb] = local_edge_vertices(d, static_cast<int>(le));
          add_bubble(la, lb, slot, bubble_scale(ces[le]));
        }
        break;
      }
      case SpaceKind::ReducedVelocityZeroTrace: {
        for (int lv = 0; lv < nlv; ++lv) {
          const Index slot = m.vertex_interior_slot[cv[lv]];
          if (slot >= 0) add_vertex_vector(LocalDof::Shape::p1_vertex, lv, d * slot);
        }
        const Index bubble_base = d * niv;
        const auto& ces = m.cell_edges[c];
        for (std::size_t le = 0; le < ces.size(); ++le) {
          const Index slot = m.edge_interior_slot[ces[le]];
          if (slot < 0) continue;
          const auto [la, lb] = local_edge_vertices(d, static_cast<int>(le));
          add_bubble(la, lb, bubble_base + slot, 1.0);
        }
        break;
      }
      case SpaceKind::ReducedVelocityFull: {
        for (int lv = 0; lv < nlv; ++lv)
          add_vertex_vector(LocalDof::Shape::p1_vertex, lv, d * cv[lv]);
        const Index bubble_base = d * nv;
        const auto& ces = m.cell_edges[c];
        for (std::size_t le = 0; le < ces.size(); ++le) {
          const Index slot = m.edge_interior_slot[ces[le]];
          if (slot < 0) continue;
          const auto [la, lb] = local_edge_vertices(d, static_cast<int>(le));
          add_bubble(la, lb, bubble_base + slot, 1.0);
        }
        break;
      }
    }
  }
}

double FunctionSpace::bubble_scale(Index edge) const {
  if (edge_patch_measure_.empty())
    throw std::logic_error("bubble_scale: space has no bubble functions");
  const double vol = edge_patch_measure_[edge];
  if (vol <= 0.0) throw std::logic_error("bubble_scale: empty edge patch");
  const int d = mesh_->dim;
  return static_cast<double>((d + 1) * (d + 2)) / vol;
}

void FunctionSpace::eval_local(Index cell, const CellGeometry& geo,
                               const Eigen::VectorXd& lambda, Eigen::MatrixXd& values,
                               std::vector<Eigen::MatrixXd>& grads, bool want_grads) const {
  const int d = mesh_->dim;
  const int m = value_dim_;
  const std::vector<LocalDof>& dofs = cell_dofs_[cell];
  const int n = static_cast<int>(dofs.size());
  values.setZero(m, n);
  if (want_grads) {
    grads.resize(n);
    for (auto& g : grads) g.setZero(m, d);
  }

  Eigen::RowVectorXd sgrad(d);
  for (int l = 0; l < n; ++l) {
    const LocalDof& ld = dofs[l];
    if (ld.shape == LocalDof::Shape::bubble) {
      const Eigen::VectorXd t = geo.verts.col(ld.b) - geo.verts.col(ld.a);
      const double la = lambda[ld.a], lb = lambda[ld.b];
      values.col(l) = ld.factor * la * lb * t;
      if (want_grads)
        grads[l] = ld.factor * t * (lb * geo.grads.row(ld.a) + la * geo.grads.row(ld.b));
      continue;
    }
    double val = 0.0;
    sgrad.setZero();
    switch (ld.shape) {
      case LocalDof::Shape::p1_vertex:
        val = lambda[ld.a];
        sgrad = geo.grads.row(ld.a);
        break;
      case LocalDof::Shape::p2_vertex:
        val = lambda[ld.a] * (2.0 * lambda[ld.a] - 1.0);
        sgrad = (4.0 * lambda[ld.a] - 1.0) * geo.grads.row(ld.a);
        break;
      case LocalDof::Shape::p2_edge:
        val = 4.0 * lambda[ld.a] * lambda[ld.b];
        sgrad = 4.0 * (lambda[ld.b] * geo.grads.row(ld.a) + lambda[ld.a] * geo.grads.row(ld.b));
        break;
      case LocalDof::Shape::cell_const:
        val = 1.0;
        break;
      case LocalDof::Shape::bubble:
        break;
    }
    const int row = ld.comp >= 0 ? ld.comp : 0;
    values(row, l) = val;
    if (want_grads) grads[l].row(row) = sgrad;
  }
}

std::vector<Index> FunctionSpace::vertex_dofs(Index v) const {
  const Mesh& m = *mesh_;
  const int d = m.dim;
  std::vector<Index> out;
  switch (kind_) {
    case SpaceKind::P1Scalar:
    case SpaceKind::P1Pressure:
    case SpaceKind::AugmentedPressure:
      out.push_back(v);
      break;
    case SpaceKind::P0Scalar:
      break;
    case SpaceKind::P1VectorZeroTrace:
    case SpaceKind::P2VectorZeroTrace:
    case SpaceKind::ReducedVelocityZeroTrace: {
      const Index slot = m.vertex_interior_slot[v];
      if (slot >= 0)
        for (int k = 0; k < d; ++k) out.push_back(d * slot + k);
      break;
    }
    case SpaceKind::P2VectorFull:
    case SpaceKind::ReducedVelocityFull:
      for (int k = 0; k < d; ++k) out.push_back(d * v + k);
      break;
    case SpaceKind::EdgeBubble:
      break;
  }
  return out;
}

std::vector<Index> FunctionSpace::boundary_dofs() const {
  const Mesh& m = *mesh_;
  const int d = m.dim;
  std::vector<Index> out;
  if (is_zero_trace_kind(kind_)) return out;
  switch (kind_) {
    case SpaceKind::P1Scalar:
    case SpaceKind::P1Pressure:
    case SpaceKind::AugmentedPressure:
      for (Index v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_on_boundary[v]) out.push_back(v);
      break;
    case SpaceKind::P2VectorFull:
      for (Index v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_on_boundary[v])
          for (int k = 0; k < d; ++k) out.push_back(d * v + k);
      for (Index e = 0; e < m.n_edges(); ++e)
        if (m.edge_on_boundary[e])
          for (int k = 0; k < d; ++k) out.push_back(d * m.n_vertices() + d * e + k);
      break;
    case SpaceKind::ReducedVelocityFull:
      for (Index v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_on_boundary[v])
          for (int k = 0; k < d; ++k) out.push_back(d * v + k);
      break;
    default:
      break;
  }
  return out;
}

std::shared_ptr<const FunctionSpace> make_space(std::shared_ptr<const Mesh> mesh, SpaceKind kind) {
  return std::make_shared<const FunctionSpace>(std::move(mesh), kind);
}

}  // namespace thfortin
