#include "thfortin/analysis.hpp"

#include "thfortin/bubbles.hpp"
#include "thfortin/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace thfortin {

namespace {

using MatLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecLD = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

MatLD to_long_double(const Eigen::SparseMatrix<double>& m) {
  return Eigen::MatrixXd(m).cast<long double>();
}

/// Orthonormal basis of { y : g . y = 0 } as the trailing columns of the
/// Householder reflector mapping g onto a coordinate axis.
MatLD constraint_complement(const VecLD& g) {
  const Eigen::Index r = g.size();
  const long double norm = g.norm();
  if (norm == 0) return MatLD::Identity(r, r);
  VecLD w = g;
  w[0] += (g[0] >= 0 ? norm : -norm);
  MatLD h = MatLD::Identity(r, r);
  h -= (2.0L / w.squaredNorm()) * (w * w.transpose());
  return h.rightCols(r - 1);
}

double representation_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0 || nb == 0) return 0;
  return std::abs(a.dot(b)) / (na * nb);
}

Eigen::VectorXd random_barycentric(int dim, std::mt19937_64& rng) {
  Eigen::VectorXd lambda(dim + 1);
  for (int a = 0; a <= dim; ++a) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    lambda[a] = -std::log(1.0 - u);
  }
  lambda /= lambda.sum();
  return lambda;
}

double sin_sq(double t) { return std::sin(M_PI * t) * std::sin(M_PI * t); }
double sin_sq_d1(double t) { return M_PI * std::sin(2 * M_PI * t); }
double sin_sq_d2(double t) { return 2 * M_PI * M_PI * std::cos(2 * M_PI * t); }

double poly_bump(double t) { return t * t * (1 - t) * (1 - t); }
double poly_bump_d1(double t) { return 2 * t * (1 - t) * (1 - 2 * t); }
double poly_bump_d2(double t) { return 2 - 12 * t + 12 * t * t; }

/// Field (d2 psi, -d1 psi, 0, ...) for psi = prod_m f(x_m), given f, f', f''.
std::shared_ptr<AnalyticField> make_curl_field(int dim, double (*f)(double),
                                               double (*f1)(double), double (*f2)(double)) {
  auto partial = [=](const Eigen::VectorXd& x, int m) {
    double p = f1(x[m]);
    for (int k = 0; k < x.size(); ++k)
      if (k != m) p *= f(x[k]);
    return p;
  };
  auto partial2 = [=](const Eigen::VectorXd& x, int m, int j) {
    double p = 1;
    if (m == j) {
      p = f2(x[m]);
      for (int k = 0; k < x.size(); ++k)
        if (k != m) p *= f(x[k]);
      return p;
    }
    p = f1(x[m]) * f1(x[j]);
    for (int k = 0; k < x.size(); ++k)
      if (k != m && k != j) p *= f(x[k]);
    return p;
  };
  auto value = [=](const Eigen::VectorXd& x) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v[0] = partial(x, 1);
    v[1] = -partial(x, 0);
    return v;
  };
  auto gradient = [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
      g(0, j) = partial2(x, 1, j);
      g(1, j) = -partial2(x, 0, j);
    }
    return g;
  };
  return std::make_shared<AnalyticField>(dim, value, gradient);
}

}  // namespace

InfSupReport infsup_constant(std::shared_ptr<const Mesh> mesh, SpaceKind velocity_kind,
                             SpaceKind pressure_kind, double solver_tol, int quad_degree) {
  if (!is_zero_trace_kind(velocity_kind))
    throw std::invalid_argument("infsup_constant needs a zero-trace velocity space");
  if (is_vector_kind(pressure_kind))
    throw std::invalid_argument("infsup_constant needs a scalar pressure space");

  auto velocity = make_space(mesh, velocity_kind);
  auto pressure = make_space(mesh, pressure_kind);

  InfSupReport report;
  report.velocity_space = space_kind_name(velocity_kind);
  report.pressure_space = space_kind_name(pressure_kind);
  report.n_velocity = velocity->dim();
  report.n_pressure = pressure->dim();
  report.solver_tol = solver_tol;

  const MatLD a = to_long_double(
      assemble_operator(OperatorTag::stiffness, velocity, velocity, quad_degree).matrix);
  const MatLD b = to_long_double(
      assemble_operator(OperatorTag::divergence, pressure, velocity, quad_degree).matrix);
  const MatLD mp = to_long_double(
      assemble_operator(OperatorTag::mass, pressure, pressure, quad_degree).matrix);

  Eigen::LLT<MatLD> a_llt(a);
  if (a_llt.info() != Eigen::Success)
    throw std::runtime_error("velocity stiffness matrix is not positive definite");
  MatLD schur = b * a_llt.solve(b.transpose());
  schur = ((schur + schur.transpose()) / 2.0L).eval();

  // Drop the numerical null space of the pressure Gram (redundant
  // representations), then the mean-value direction.
  Eigen::SelfAdjointEigenSolver<MatLD> mp_eig(mp);
  const VecLD mp_values = mp_eig.eigenvalues();
  const long double mp_cut = 1e-12L * mp_values[mp_values.size() - 1];
  Eigen::Index first_kept = 0;
  while (first_kept < mp_values.size() && mp_values[first_kept] <= mp_cut) ++first_kept;
  const Eigen::Index r = mp_values.size() - first_kept;
  if (r < 2) throw std::runtime_error("pressure space too small for a mean-zero pencil");
  const MatLD u_r = mp_eig.eigenvectors().rightCols(r);
  const VecLD lambda_r = mp_values.tail(r);

  // Constant pressures integrate via the Gram: <q, 1> = q^T M c with c any
  // representation of 1; in deflated coordinates the constraint vector is
  // Lambda_r U_r^T c.
  const VecLD ones = VecLD::Ones(pressure->dim());
  const VecLD g = lambda_r.asDiagonal() * (u_r.transpose() * ones);
  const MatLD z = constraint_complement(g);
  report.n_pressure_effective = static_cast<Index>(z.cols());

  const MatLD s_hat = z.transpose() * (u_r.transpose() * schur * u_r) * z;
  const MatLD m_hat = z.transpose() * (lambda_r.asDiagonal() * MatLD(z));
  Eigen::GeneralizedSelfAdjointEigenSolver<MatLD> pencil(
      ((s_hat + s_hat.transpose()) / 2.0L).eval(), ((m_hat + m_hat.transpose()) / 2.0L).eval());
  if (pencil.info() != Eigen::Success) throw std::runtime_error("inf-sup pencil solve failed");

  const VecLD values = pencil.eigenvalues();
  report.beta_squared = static_cast<double>(values[0]);
  report.lambda_max = static_cast<double>(values[values.size() - 1]);
  report.beta = std::sqrt(std::max(report.beta_squared, 0.0));
  const int head = static_cast<int>(std::min<Eigen::Index>(5, values.size()));
  for (int k = 0; k < head; ++k) report.spectrum_head.push_back(static_cast<double>(values[k]));
  for (Eigen::Index k = 0; k < values.size(); ++k)
    if (std::sqrt(std::max(static_cast<double>(values[k]), 0.0)) <= solver_tol)
      ++report.kernel_dim;
  report.singular = report.beta <= solver_tol;

  VecLD kernel = u_r * (z * pencil.eigenvectors().col(0));
  report.kernel = kernel.cast<double>();
  if (report.kernel.norm() > 0) report.kernel /= report.kernel.norm();
  return report;
}

Eigen::VectorXd octahedron_sign_pressure(const Mesh& mesh) {
  Eigen::VectorXd sign(mesh.n_cells());
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(mesh.dim);
    for (Index v : mesh.cells[c]) centroid += mesh.vertex(v);
    centroid /= mesh.dim + 1;
    double p = 1;
    for (int k = 0; k < mesh.dim; ++k) p *= centroid[k];
    sign[c] = p < 0 ? -1.0 : 1.0;
  }
  return sign;
}

CounterexampleReport octahedron_counterexample(std::uint64_t seed) {
  auto mesh = std::make_shared<const Mesh>(octahedron_basic());
  CounterexampleReport report;

  const Eigen::VectorXd qbar = octahedron_sign_pressure(*mesh);
  for (Index c = 0; c < mesh->n_cells(); ++c)
    report.qbar_mean += qbar[c] * mesh->cell_volumes[c];

  auto velocity = make_space(mesh, SpaceKind::P2VectorZeroTrace);
  auto p0 = make_space(mesh, SpaceKind::P0Scalar);
  const auto b = assemble_operator(OperatorTag::divergence, p0, velocity);
  const Eigen::VectorXd pairings = b.matrix.transpose() * qbar;
  report.max_divergence_pairing = pairings.lpNorm<Eigen::Infinity>();

  report.p0_report = infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P0Scalar);
  report.augmented_report =
      infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::AugmentedPressure);
  report.beta_p0 = report.p0_report.beta;
  report.beta_augmented = report.augmented_report.beta;
  report.kernel_cosine = representation_cosine(report.p0_report.kernel, qbar);

  // Closed-form divergences of the hat field at the origin and of the
  // quadratic bubble on the edge toward +e1, sampled inside every cell.
  const Index origin = 0;
  const Index plus_e1 = 1;
  std::mt19937_64 rng(seed);
  const TangentialBubbleField raw_bubble(*mesh, origin, plus_e1, false);
  double worst = 0;
  for (Index c = 0; c < mesh->n_cells(); ++c) {
    const CellGeometry geo = cell_geometry(*mesh, c);
    int local_origin = -1;
    int local_e1 = -1;
    for (int a = 0; a < 4; ++a) {
      if (mesh->cells[c][a] == origin) local_origin = a;
      if (mesh->cells[c][a] == plus_e1) local_e1 = a;
    }
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd lambda = random_barycentric(mesh->dim, rng);
      const Eigen::VectorXd x = geo.point(lambda);
      const double sx[3] = {x[0] >= 0 ? 1.0 : -1.0, x[1] >= 0 ? 1.0 : -1.0,
                            x[2] >= 0 ? 1.0 : -1.0};

      // div(e_m hat_0) = -sgn(x_m); the hat has barycentric gradient rows.
      for (int m = 0; m < 3; ++m) {
        const double computed = geo.grads(local_origin, m);
        worst = std::max(worst, std::abs(computed - (-sx[m])));
      }

      // div(e_m b) for b = hat_0 hat_{e1}: nonzero only on x1 >= 0 cells.
      for (int m = 0; m < 3; ++m) {
        double computed = 0;
        if (local_e1 >= 0) {
          const Eigen::RowVectorXd grad_b = lambda[local_e1] * geo.grads.row(local_origin) +
                                            lambda[local_origin] * geo.grads.row(local_e1);
          computed = grad_b[m];
        }
        double expected = 0;
        if (local_e1 >= 0)
          expected = m == 0 ? 1 - 2 * x[0] - std::abs(x[1]) - std::abs(x[2]) : -x[0] * sx[m];
        worst = std::max(worst, std::abs(computed - expected));
        if (m == 0) {
          // Same check through the bubble field's own Jacobian.
          const double via_field = raw_bubble.divergence(c, geo, lambda, x);
          worst = std::max(worst, std::abs(via_field - expected));
        }
      }
    }
  }
  report.spot_check_error = worst;
  return report;
}

std::shared_ptr<AnalyticField> make_sin_curl_field(int dim) {
  if (dim < 2) throw std::invalid_argument("curl fields need dim >= 2");
  return make_curl_field(dim, sin_sq, sin_sq_d1, sin_sq_d2);
}

std::shared_ptr<AnalyticField> make_poly_curl_field(int dim) {
  if (dim < 2) throw std::invalid_argument("curl fields need dim >= 2");
  return make_curl_field(dim, poly_bump, poly_bump_d1, poly_bump_d2);
}

std::shared_ptr<AnalyticField> make_box_bump_field(int dim) {
  if (dim < 1) throw std::invalid_argument("bump fields need dim >= 1");
  const Eigen::VectorXd direction = Eigen::VectorXd::LinSpaced(dim, 1.0, 0.25);
  return std::make_shared<AnalyticField>(
      dim,
      [dim, direction](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        double w = 1;
        for (int m = 0; m < dim; ++m) w *= x[m] * (1 - x[m]);
        return w * direction;
      },
      [dim, direction](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::VectorXd grad(dim);
        for (int m = 0; m < dim; ++m) {
          double partial = 1 - 2 * x[m];
          for (int k = 0; k < dim; ++k)
            if (k != m) partial *= x[k] * (1 - x[k]);
          grad[m] = partial;
        }
        return direction * grad.transpose();
      });
}

bool fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                   double floor_value) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) {
    if (y[k] <= floor_value || x[k] <= 0) continue;
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  if (lx.size() < 2) return false;
  const double n = static_cast<double>(lx.size());
  double mx = 0;
  double my = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0) return false;
  slope = sxy / sxx;
  return true;
}

namespace {

void finish_convergence_report(ConvergenceReport& report) {
  std::vector<double> hs;
  std::vector<double> l2s;
  std::vector<double> h1s;
  for (const auto& row : report.rows) {
    hs.push_back(row.h);
    l2s.push_back(row.l2_error);
    h1s.push_back(row.h1_error);
    report.max_l2_error = std::max(report.max_l2_error, row.l2_error);
  }
  const bool ok_l2 = fit_log_slope(hs, l2s, report.slope_l2);
  const bool ok_h1 = fit_log_slope(hs, h1s, report.slope_h1);
  report.slopes_defined = ok_l2 && ok_h1 && report.max_l2_error > 1e-12;
}

std::string variant_name(FortinOperator::Variant variant) {
  return variant == FortinOperator::Variant::taylor_hood ? "taylor-hood" : "reduced";
}

}  // namespace

ConvergenceReport convergence_study(const Field& v, const std::string& description,
                                    int smoothness, FortinOperator::Variant variant, int dim,
                                    const std::vector<int>& ns, int quad_degree) {
  ConvergenceReport report;
  report.field_description = description;
  report.variant = variant_name(variant);
  report.smoothness = smoothness;
  for (int n : ns) {
    auto mesh = std::make_shared<const Mesh>(freudenthal_cube(dim, n));
    FortinOperator fortin(mesh, variant);
    const DiscreteField u(fortin.target_space(), fortin.apply(v, quad_degree));
    const ErrorNorms err = error_norms(*mesh, v, u, quad_degree);
    ConvergenceRow row;
    row.n = n;
    row.h = *std::max_element(mesh->cell_diameters.begin(), mesh->cell_diameters.end());
    row.l2_error = err.l2;
    row.h1_error = err.h1_semi;
    report.rows.push_back(row);
  }
  finish_convergence_report(report);
  return report;
}

ConvergenceReport representable_study(FortinOperator::Variant variant, int dim,
                                      const std::vector<int>& ns, std::uint64_t seed) {
  ConvergenceReport report;
  report.field_description = "random zero-trace field of the target space, rebuilt per mesh";
  report.variant = variant_name(variant);
  report.smoothness = 0;
  for (int n : ns) {
    auto mesh = std::make_shared<const Mesh>(freudenthal_cube(dim, n));
    FortinOperator fortin(mesh, variant);
    const auto& target_zt = *fortin.target_zero_trace_space();
    const Eigen::SparseMatrix<double> embed =
        zero_trace_embedding(target_zt, *fortin.target_space());
    const Eigen::VectorXd coeffs = embed * random_coefficients(target_zt.dim(), seed + n);
    const DiscreteField v(fortin.target_space(), coeffs);

    Eigen::VectorXd projected;
    if (variant == FortinOperator::Variant::taylor_hood) {
      projected = fortin.apply(v);
    } else {
      // The reduced target is not a subspace of the quadratic input space, so
      // feed the operator its quadratic embedding.
      const Eigen::SparseMatrix<double> lift =
          reduced_to_p2_embedding(*fortin.target_space(), *fortin.input_space());
      const DiscreteField lifted(fortin.input_space(), lift * coeffs);
      projected = fortin.apply(lifted);
    }
    const DiscreteField u(fortin.target_space(), projected);
    const ErrorNorms err = error_norms(*mesh, v, u, 2 * fortin.target_space()->max_poly_degree());
    ConvergenceRow row;
    row.n = n;
    row.h = *std::max_element(mesh->cell_diameters.begin(), mesh->cell_diameters.end());
    row.l2_error = err.l2;
    row.h1_error = err.h1_semi;
    report.rows.push_back(row);
  }
  finish_convergence_report(report);
  return report;
}

DivergenceResidual divergence_residual(const FortinOperator& fortin, const Field& v,
                                       int quad_degree) {
  const auto& mesh = *fortin.mesh_ptr();
  const auto* discrete = dynamic_cast<const DiscreteField*>(&v);
  DivergenceResidual result;
  if (quad_degree < 0) {
    if (discrete == nullptr)
      throw std::invalid_argument("divergence_residual needs a quadrature degree for analytic fields");
    // apply() picks exact defaults for discrete inputs; record the rule the
    // correction weights will use.
    result.quad_degree = 1 + std::max(discrete->space().max_poly_degree(),
                                      fortin.target_space()->max_poly_degree());
  } else {
    result.quad_degree = quad_degree;
  }

  auto p1 = make_space(fortin.mesh_ptr(), SpaceKind::P1Scalar);
  const DiscreteField u(fortin.target_space(), fortin.apply(v, quad_degree));
  const auto b_target = assemble_operator(OperatorTag::divergence, p1, fortin.target_space());
  const Eigen::VectorXd moments_u = b_target.matrix * u.coefficients();

  Eigen::VectorXd moments_v;
  if (discrete != nullptr) {
    if (discrete->space().mesh_ptr() != fortin.mesh_ptr())
      throw std::invalid_argument("discrete field lives on a different mesh than the operator");
    auto cols = make_space(fortin.mesh_ptr(), discrete->space().kind());
    const auto b_input = assemble_operator(OperatorTag::divergence, p1, cols);
    moments_v = b_input.matrix * discrete->coefficients();
    result.reference_degree = 1 + std::max(discrete->space().max_poly_degree() - 1, 0);
  } else {
    if (!v.has_gradient())
      throw std::invalid_argument("divergence_residual needs a field gradient for the reference");
    result.reference_degree = std::min(std::max(result.quad_degree + 4, 10), 13);
    const QuadratureRule rule = simplex_rule(mesh.dim, result.reference_degree);
    moments_v = Eigen::VectorXd::Zero(mesh.n_vertices());
    for (Index c = 0; c < mesh.n_cells(); ++c) {
      const CellGeometry geo = cell_geometry(mesh, c);
      for (int q = 0; q < rule.n_points(); ++q) {
        const Eigen::VectorXd lambda = rule.points.col(q);
        const Eigen::VectorXd x = geo.point(lambda);
        const double w = rule.weights[q] * geo.volume * v.divergence(c, geo, lambda, x);
        for (int a = 0; a <= mesh.dim; ++a) moments_v[mesh.cells[c][a]] += w * lambda[a];
      }
    }
  }

  result.max_residual = (moments_u - moments_v).lpNorm<Eigen::Infinity>();
  result.reference_scale = moments_v.lpNorm<Eigen::Infinity>();
  return result;
}

double fortin_operator_norm(const FortinOperator& fortin, int quad_degree) {
  const auto& input_zt = fortin.input_zero_trace_space();
  const auto& target_zt = fortin.target_zero_trace_space();
  const MatLD a_in = to_long_double(
      assemble_operator(OperatorTag::stiffness, input_zt, input_zt, quad_degree).matrix);
  const MatLD a_tgt = to_long_double(
      assemble_operator(OperatorTag::stiffness, target_zt, target_zt, quad_degree).matrix);
  const MatLD p = to_long_double(fortin.zero_trace_matrix(quad_degree));
  const MatLD g = p.transpose() * a_tgt * p;
  Eigen::GeneralizedSelfAdjointEigenSolver<MatLD> pencil(
      ((g + g.transpose()) / 2.0L).eval(), a_in);
  if (pencil.info() != Eigen::Success) throw std::runtime_error("operator norm pencil failed");
  const long double top = pencil.eigenvalues()[pencil.eigenvalues().size() - 1];
  return std::sqrt(std::max(static_cast<double>(top), 0.0));
}

DofCensusRow dof_census(int dim, int n) {
  const Mesh mesh = freudenthal_cube(dim, n);
  DofCensusRow row;
  row.dim = dim;
  row.n = n;
  row.vertices = mesh.n_vertices();
  row.edges = mesh.n_edges();
  row.cells = mesh.n_cells();
  row.interior_vertices = static_cast<Index>(mesh.interior_vertices.size());
  row.interior_edges = static_cast<Index>(mesh.interior_edges.size());
  row.dim_vh = dim * (row.interior_vertices + row.interior_edges);
  row.dim_reduced = dim * row.interior_vertices + row.interior_edges;
  row.dim_mini = dim * (row.interior_vertices + row.cells);
  row.dim_qh = row.vertices - 1;
  row.dim_qh_rep = row.vertices;
  const double scale = std::pow(static_cast<double>(n), dim);
  row.coeff_vh = row.dim_vh / scale;
  row.coeff_reduced = row.dim_reduced / scale;
  row.coeff_mini = row.dim_mini / scale;
  row.coeff_qh = row.dim_qh / scale;
  return row;
}

std::array<double, 4> census_reference_coefficients(int dim) {
  double factorial = 1;
  for (int k = 2; k <= dim; ++k) factorial *= k;
  const double pow2 = std::pow(2.0, dim);
  return {dim + pow2 - 1, dim * (factorial + 1), dim * pow2, 1.0};
}

}  // namespace thfortin
