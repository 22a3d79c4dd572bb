#include "thfortin/field.hpp"

#include <random>
#include <stdexcept>

namespace thfortin {

Eigen::MatrixXd Field::gradient(Index, const CellGeometry&, const Eigen::VectorXd&,
                                const Eigen::VectorXd&) const {
  throw std::logic_error("field has no gradient");
}

double Field::divergence(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                         const Eigen::VectorXd& x) const {
  return gradient(cell, geo, lambda, x).trace();
}

DiscreteField::DiscreteField(std::shared_ptr<const FunctionSpace> space,
                             Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != space_->dim())
    throw std::invalid_argument("DiscreteField: coefficient count does not match space dimension");
}

Eigen::VectorXd DiscreteField::value(Index cell, const CellGeometry& geo,
                                     const Eigen::VectorXd& lambda,
                                     const Eigen::VectorXd&) const {
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
  space_->eval_local(cell, geo, lambda, values, grads, false);
  const auto& dofs = space_->cell_dofs(cell);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space_->value_dim());
  for (std::size_t l = 0; l < dofs.size(); ++l)
    out += coeffs_[dofs[l].global] * values.col(static_cast<Index>(l));
  return out;
}

Eigen::MatrixXd DiscreteField::gradient(Index cell, const CellGeometry& geo,
                                        const Eigen::VectorXd& lambda,
                                        const Eigen::VectorXd&) const {
  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
  space_->eval_local(cell, geo, lambda, values, grads, true);
  const auto& dofs = space_->cell_dofs(cell);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(space_->value_dim(), space_->mesh().dim);
  for (std::size_t l = 0; l < dofs.size(); ++l) out += coeffs_[dofs[l].global] * grads[l];
  return out;
}

Eigen::MatrixXd AnalyticField::gradient(Index, const CellGeometry&, const Eigen::VectorXd&,
                                        const Eigen::VectorXd& x) const {
  if (!gradient_) throw std::logic_error("analytic field has no gradient callback");
  return gradient_(x);
}

LinearCombinationField::LinearCombinationField(std::vector<std::pair<double, const Field*>> terms)
    : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("LinearCombinationField: no terms");
  value_dim_ = terms_.front().second->value_dim();
  for (const auto& [c, f] : terms_) {
    if (f->value_dim() != value_dim_)
      throw std::invalid_argument("LinearCombinationField: mixed value dimensions");
    has_gradient_ = has_gradient_ && f->has_gradient();
  }
}

Eigen::VectorXd LinearCombinationField::value(Index cell, const CellGeometry& geo,
                                              const Eigen::VectorXd& lambda,
                                              const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(value_dim_);
  for (const auto& [c, f] : terms_) out += c * f->value(cell, geo, lambda, x);
  return out;
}

Eigen::MatrixXd LinearCombinationField::gradient(Index cell, const CellGeometry& geo,
                                                 const Eigen::VectorXd& lambda,
                                                 const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out;
  bool first = true;
  for (const auto& [c, f] : terms_) {
    if (first) {
      out = c * f->gradient(cell, geo, lambda, x);
      first = false;
    } else {
      out += c * f->gradient(cell, geo, lambda, x);
    }
  }
  return out;
}

CellMaskedField::CellMaskedField(const Field& inner, const Mesh& mesh,
                                 const std::vector<Index>& cells)
    : inner_(inner), mask_(mesh.n_cells(), 0) {
  for (Index c : cells) mask_.at(c) = 1;
}

Eigen::VectorXd CellMaskedField::value(Index cell, const CellGeometry& geo,
                                       const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& x) const {
  if (!mask_[cell]) return Eigen::VectorXd::Zero(inner_.value_dim());
  return inner_.value(cell, geo, lambda, x);
}

Eigen::MatrixXd CellMaskedField::gradient(Index cell, const CellGeometry& geo,
                                          const Eigen::VectorXd& lambda,
                                          const Eigen::VectorXd& x) const {
  if (!mask_[cell])
    return Eigen::MatrixXd::Zero(inner_.value_dim(), geo.grads.cols());
  return inner_.gradient(cell, geo, lambda, x);
}

Eigen::VectorXd random_coefficients(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    out[i] = 2.0 * u - 1.0;
  }
  return out;
}

}  // namespace thfortin
