#pragma once

#include "thfortin/spaces.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace thfortin {

/// A function on the meshed domain, sampled inside quadrature loops.
/// Discrete fields read (cell, geo, lambda); analytic ones read the physical
/// point x. Gradients are value_dim x dim Jacobians (row i = grad of
/// component i).
class Field {
 public:
  virtual ~Field() = default;
  virtual int value_dim() const = 0;
  virtual bool has_gradient() const { return false; }
  virtual Eigen::VectorXd value(Index cell, const CellGeometry& geo,
                                const Eigen::VectorXd& lambda, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd gradient(Index cell, const CellGeometry& geo,
                                   const Eigen::VectorXd& lambda, const Eigen::VectorXd& x) const;

  /// Trace of the Jacobian; only meaningful when value_dim == space dim.
  double divergence(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                    const Eigen::VectorXd& x) const;
};

class DiscreteField : public Field {
 public:
  DiscreteField(std::shared_ptr<const FunctionSpace> space, Eigen::VectorXd coefficients);

  int value_dim() const override { return space_->value_dim(); }
  bool has_gradient() const override { return true; }
  Eigen::VectorXd value(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                        const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd gradient(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& x) const override;

  const FunctionSpace& space() const { return *space_; }
  const std::shared_ptr<const FunctionSpace>& space_ptr() const { return space_; }
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  Eigen::VectorXd& coefficients() { return coeffs_; }

 private:
  std::shared_ptr<const FunctionSpace> space_;
  Eigen::VectorXd coeffs_;
};

class AnalyticField : public Field {
 public:
  using ValueFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using GradientFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  AnalyticField(int value_dim, ValueFn value, GradientFn gradient = nullptr)
      : value_dim_(value_dim), value_(std::move(value)), gradient_(std::move(gradient)) {}

  int value_dim() const override { return value_dim_; }
  bool has_gradient() const override { return static_cast<bool>(gradient_); }
  Eigen::VectorXd value(Index, const CellGeometry&, const Eigen::VectorXd&,
                        const Eigen::VectorXd& x) const override {
    return value_(x);
  }
  Eigen::MatrixXd gradient(Index, const CellGeometry&, const Eigen::VectorXd&,
                           const Eigen::VectorXd& x) const override;

 private:
  int value_dim_;
  ValueFn value_;
  GradientFn gradient_;
};

/// c1 * f1 + c2 * f2 + ...; terms are non-owning and must outlive the object.
class LinearCombinationField : public Field {
 public:
  LinearCombinationField(std::vector<std::pair<double, const Field*>> terms);

  int value_dim() const override { return value_dim_; }
  bool has_gradient() const override { return has_gradient_; }
  Eigen::VectorXd value(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                        const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd gradient(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& x) const override;

 private:
  std::vector<std::pair<double, const Field*>> terms_;
  int value_dim_ = 0;
  bool has_gradient_ = true;
};

/// inner restricted to a cell set (zero elsewhere). Used to localize
/// perturbations; the restriction is per cell, not pointwise continuous.
class CellMaskedField : public Field {
 public:
  CellMaskedField(const Field& inner, const Mesh& mesh, const std::vector<Index>& cells);

  int value_dim() const override { return inner_.value_dim(); }
  bool has_gradient() const override { return inner_.has_gradient(); }
  Eigen::VectorXd value(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                        const Eigen::VectorXd& x) const override;
  Eigen::MatrixXd gradient(Index cell, const CellGeometry& geo, const Eigen::VectorXd& lambda,
                           const Eigen::VectorXd& x) const override;

 private:
  const Field& inner_;
  std::vector<char> mask_;
};

/// Deterministic coefficients in [-1, 1], independent of the C++ library's
/// distribution implementation (mantissa bits of mt19937_64 draws).
Eigen::VectorXd random_coefficients(Index n, std::uint64_t seed);

}  // namespace thfortin
