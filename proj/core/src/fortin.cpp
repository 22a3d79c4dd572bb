#include "thfortin/fortin.hpp"

#include <stdexcept>

namespace thfortin {

Eigen::SparseMatrix<double> zero_trace_embedding(const FunctionSpace& zero_trace,
                                                 const FunctionSpace& full) {
  const Mesh& mesh = zero_trace.mesh();
  if (zero_trace.mesh_ptr().get() != full.mesh_ptr().get())
    throw std::invalid_argument("zero_trace_embedding: spaces live on different meshes");
  const int d = mesh.dim;
  const Index nv = mesh.n_vertices();
  const Index niv = static_cast<Index>(mesh.interior_vertices.size());

  const auto pair_ok = [&](SpaceKind zt, SpaceKind f) {
    return (zt == SpaceKind::P2VectorZeroTrace && f == SpaceKind::P2VectorFull) ||
           (zt == SpaceKind::ReducedVelocityZeroTrace && f == SpaceKind::ReducedVelocityFull) ||
           (zt == SpaceKind::P1VectorZeroTrace && f == SpaceKind::ReducedVelocityFull);
  };
  if (!pair_ok(zero_trace.kind(), full.kind()))
    throw std::invalid_argument("zero_trace_embedding: space kinds do not match");

  std::vector<Eigen::Triplet<double>> triplets;
  for (Index s = 0; s < niv; ++s) {
    const Index v = mesh.interior_vertices[s];
    for (int k = 0; k < d; ++k) triplets.emplace_back(d * v + k, d * s + k, 1.0);
  }
  if (zero_trace.kind() == SpaceKind::P2VectorZeroTrace) {
    for (std::size_t s = 0; s < mesh.interior_edges.size(); ++s) {
      const Index e = mesh.interior_edges[s];
      for (int k = 0; k < d; ++k)
        triplets.emplace_back(d * nv + d * e + k, d * niv + d * static_cast<Index>(s) + k, 1.0);
    }
  } else if (zero_trace.kind() == SpaceKind::ReducedVelocityZeroTrace) {
    for (std::size_t s = 0; s < mesh.interior_edges.size(); ++s)
      triplets.emplace_back(d * nv + static_cast<Index>(s), d * niv + static_cast<Index>(s), 1.0);
  }

  Eigen::SparseMatrix<double> out(full.dim(), zero_trace.dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::SparseMatrix<double> bubble_embedding(const FunctionSpace& bubbles,
                                             const FunctionSpace& target) {
  if (bubbles.kind() != SpaceKind::EdgeBubble)
    throw std::invalid_argument("bubble_embedding: first space must be the edge bubbles");
  if (bubbles.mesh_ptr().get() != target.mesh_ptr().get())
    throw std::invalid_argument("bubble_embedding: spaces live on different meshes");
  const Mesh& mesh = bubbles.mesh();
  const int d = mesh.dim;
  const Index nv = mesh.n_vertices();

  std::vector<Eigen::Triplet<double>> triplets;
  if (target.kind() == SpaceKind::P2VectorFull) {
    for (std::size_t s = 0; s < mesh.interior_edges.size(); ++s) {
      const Index e = mesh.interior_edges[s];
      const double scale = bubbles.bubble_scale(e);
      const Eigen::VectorXd t = mesh.vertex(mesh.edges[e][1]) - mesh.vertex(mesh.edges[e][0]);
      // hat_i hat_j = quarter of the midpoint basis function
      for (int k = 0; k < d; ++k)
        triplets.emplace_back(d * nv + d * e + k, static_cast<Index>(s), scale * t[k] / 4.0);
    }
  } else if (target.kind() == SpaceKind::ReducedVelocityFull) {
    for (std::size_t s = 0; s < mesh.interior_edges.size(); ++s)
      triplets.emplace_back(d * nv + static_cast<Index>(s), static_cast<Index>(s),
                            bubbles.bubble_scale(mesh.interior_edges[s]));
  } else {
    throw std::invalid_argument("bubble_embedding: unsupported target kind");
  }

  Eigen::SparseMatrix<double> out(target.dim(), bubbles.dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

Eigen::SparseMatrix<double> reduced_to_p2_embedding(const FunctionSpace& reduced,
                                                    const FunctionSpace& p2) {
  if (reduced.kind() != SpaceKind::ReducedVelocityFull || p2.kind() != SpaceKind::P2VectorFull)
    throw std::invalid_argument("reduced_to_p2_embedding: wrong space kinds");
  if (reduced.mesh_ptr().get() != p2.mesh_ptr().get())
    throw std::invalid_argument("reduced_to_p2_embedding: spaces live on different meshes");
  const Mesh& mesh = reduced.mesh();
  const int d = mesh.dim;
  const Index nv = mesh.n_vertices();

  std::vector<Eigen::Triplet<double>> triplets;
  for (Index v = 0; v < nv; ++v)
    for (int k = 0; k < d; ++k) triplets.emplace_back(d * v + k, d * v + k, 1.0);
  for (Index e = 0; e < mesh.n_edges(); ++e) {
    // hat_v = (own quadratic vertex function) + 1/2 (incident midpoint functions)
    for (const Index v : mesh.edges[e])
      for (int k = 0; k < d; ++k)
        triplets.emplace_back(d * nv + d * e + k, d * v + k, 0.5);
  }
  for (std::size_t s = 0; s < mesh.interior_edges.size(); ++s) {
    const Index e = mesh.interior_edges[s];
    const Eigen::VectorXd t = mesh.vertex(mesh.edges[e][1]) - mesh.vertex(mesh.edges[e][0]);
    for (int k = 0; k < d; ++k)
      triplets.emplace_back(d * nv + d * e + k, d * nv + static_cast<Index>(s), t[k] / 4.0);
  }

  Eigen::SparseMatrix<double> out(p2.dim(), reduced.dim());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

FortinOperator::FortinOperator(std::shared_ptr<const Mesh> mesh, Variant variant)
    : mesh_(std::move(mesh)), variant_(variant) {
  input_ = make_space(mesh_, SpaceKind::P2VectorFull);
  input_zt_ = make_space(mesh_, SpaceKind::P2VectorZeroTrace);
  bubbles_ = make_space(mesh_, SpaceKind::EdgeBubble);
  if (variant_ == Variant::taylor_hood) {
    target_ = input_;
    target_zt_ = input_zt_;
  } else {
    target_ = make_space(mesh_, SpaceKind::ReducedVelocityFull);
    target_zt_ = make_space(mesh_, SpaceKind::ReducedVelocityZeroTrace);
  }
  smoothing_ = std::make_unique<ScottZhangOperator>(target_);
  correction_ = std::make_unique<DivergenceCorrection>(bubbles_);
  bubble_embed_ = bubble_embedding(*bubbles_, *target_);
}

Eigen::VectorXd FortinOperator::apply(const Field& v, int quad_degree) const {
  int sz_degree = quad_degree;
  int corr_degree = quad_degree;
  if (quad_degree < 0) {
    const auto* dv = dynamic_cast<const DiscreteField*>(&v);
    if (!dv)
      throw std::invalid_argument(
          "FortinOperator::apply: a quadrature degree is required for non-discrete fields");
    const int deg = std::max(dv->space().max_poly_degree(), target_->max_poly_degree());
    sz_degree = target_->max_poly_degree() + deg;
    corr_degree = deg + 1;
  }

  const Eigen::VectorXd u1 = smoothing_->apply(v, sz_degree);
  const DiscreteField u1_field(target_, u1);
  const LinearCombinationField residual({{1.0, &v}, {-1.0, &u1_field}});
  const Eigen::VectorXd c = correction_->apply(residual, corr_degree);
  return u1 + bubble_embed_ * c;
}

Eigen::SparseMatrix<double> FortinOperator::matrix(int quad_degree) const {
  const Eigen::SparseMatrix<double> p1 = smoothing_->matrix(*input_, quad_degree);
  const Eigen::SparseMatrix<double> w = correction_->matrix(*input_, quad_degree);

  Eigen::SparseMatrix<double> identity(input_->dim(), input_->dim());
  identity.setIdentity();

  if (variant_ == Variant::taylor_hood) {
    const Eigen::SparseMatrix<double> residual = identity - p1;
    return p1 + bubble_embed_ * (w * residual);
  }
  const Eigen::SparseMatrix<double> lift = reduced_to_p2_embedding(*target_, *input_);
  const Eigen::SparseMatrix<double> residual = identity - lift * p1;
  return p1 + bubble_embed_ * (w * residual);
}

Eigen::SparseMatrix<double> FortinOperator::zero_trace_matrix(int quad_degree) const {
  const Eigen::SparseMatrix<double> embed_in = zero_trace_embedding(*input_zt_, *input_);
  const Eigen::SparseMatrix<double> embed_out = zero_trace_embedding(*target_zt_, *target_);
  return embed_out.transpose() * matrix(quad_degree) * embed_in;
}

}  // namespace thfortin
