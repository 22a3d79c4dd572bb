#pragma once

#include "thfortin/assembly.hpp"
#include "thfortin/fortin.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace thfortin {

/// Inf-sup constant of a velocity/pressure pair as the square root of the
/// smallest eigenvalue of the pressure Schur pencil S q = lambda M_p q,
/// S = B A^{-1} B^T, restricted to mean-zero pressures. Redundant pressure
/// representations (AugmentedPressure) are handled by discarding the
/// numerical null space of M_p before the mean constraint. All dense algebra
/// runs in extended precision so that an exactly-singular pair reports a
/// beta far below the zero threshold instead of solver noise.
struct InfSupReport {
  std::string velocity_space;
  std::string pressure_space;
  Index n_velocity = 0;
  Index n_pressure = 0;            ///< representation size
  Index n_pressure_effective = 0;  ///< after null-space removal and mean constraint
  double beta = 0;
  double beta_squared = 0;
  double lambda_max = 0;              ///< largest pencil eigenvalue, the spectrum's scale
  std::vector<double> spectrum_head;  ///< smallest (up to) 5 pencil eigenvalues
  int kernel_dim = 0;                 ///< eigenvalues with sqrt below solver_tol
  bool singular = false;              ///< beta <= solver_tol
  double solver_tol = 0;
  Eigen::VectorXd kernel;  ///< representation coordinates of the minimizer
};

InfSupReport infsup_constant(std::shared_ptr<const Mesh> mesh, SpaceKind velocity_kind,
                             SpaceKind pressure_kind, double solver_tol = 1e-8,
                             int quad_degree = -1);

/// The piecewise-constant sign pattern sgn(x1) sgn(x2) sgn(x3) on
/// octahedron_basic (per-cell sign of the centroid coordinates product).
Eigen::VectorXd octahedron_sign_pressure(const Mesh& mesh);

struct CounterexampleReport {
  double qbar_mean = 0;                ///< integral of the sign pressure
  double max_divergence_pairing = 0;   ///< max over V_h basis of |<div phi, qbar>|
  double beta_p0 = 0;
  double beta_augmented = 0;
  double kernel_cosine = 0;            ///< deflated-kernel match with qbar
  double spot_check_error = 0;         ///< explicit divergence formulas at random points
  InfSupReport p0_report;
  InfSupReport augmented_report;
};

CounterexampleReport octahedron_counterexample(std::uint64_t seed = 0);

struct ConvergenceRow {
  int n = 0;
  double h = 0;
  double l2_error = 0;
  double h1_error = 0;
};

struct ConvergenceReport {
  std::string field_description;
  std::string variant;
  int smoothness = 3;
  std::vector<ConvergenceRow> rows;
  bool slopes_defined = false;  ///< false when errors sit at round-off scale
  double slope_l2 = 0;
  double slope_h1 = 0;
  double max_l2_error = 0;
};

/// Interpolation errors of the Fortin operator for an analytic zero-trace
/// field over freudenthal_cube(dim, n) for each n; slopes are least-squares
/// fits of log error against log h (needs >= 3 meshes). Fields whose errors
/// never rise above round-off (e.g. fields of the target space itself) get
/// slopes_defined = false.
ConvergenceReport convergence_study(const Field& v, const std::string& description,
                                    int smoothness, FortinOperator::Variant variant, int dim,
                                    const std::vector<int>& ns, int quad_degree = 8);

/// Per-mesh projection check: a seeded random discrete field of the
/// operator's own target space must be reproduced exactly, mesh by mesh.
ConvergenceReport representable_study(FortinOperator::Variant variant, int dim,
                                      const std::vector<int>& ns, std::uint64_t seed = 0);

/// The divergence-free curl field (d2 psi, -d1 psi, 0, ...) of
/// psi = prod_m sin^2(pi x_m): zero trace on the unit cube, C^infinity.
std::shared_ptr<AnalyticField> make_sin_curl_field(int dim);
/// Same construction from psi = prod_m x_m^2 (1-x_m)^2 restricted to the
/// first two coordinates: a polynomial of degree 7 per component, zero trace.
std::shared_ptr<AnalyticField> make_poly_curl_field(int dim);

/// Zero-trace polynomial bump on the unit cube: prod_m x_m (1 - x_m) times a
/// fixed direction vector. Degree 2*dim, so degree-8 quadrature integrates
/// its divergence moments exactly for dim <= 4.
std::shared_ptr<AnalyticField> make_box_bump_field(int dim);

struct DivergenceResidual {
  double max_residual = 0;     ///< max_k |<div(Pi v - v), hat_k>|
  double reference_scale = 0;  ///< max_k |<div v, hat_k>|
  int quad_degree = 0;         ///< degree used for the operator application
  int reference_degree = 0;    ///< degree used for the <div v, hat_k> reference
};

/// Divergence-moment preservation of Pi v against all P1 hat functions.
/// Discrete sides are integrated exactly; the analytic reference uses a
/// quadrature degree raised well above quad_degree.
DivergenceResidual divergence_residual(const FortinOperator& fortin, const Field& v,
                                       int quad_degree = -1);

/// Largest Rayleigh quotient of Pi^T A_target Pi against A_input over the
/// zero-trace quadratic space, A = vector stiffness; the discrete W^{1,2}
/// operator norm is its square root.
double fortin_operator_norm(const FortinOperator& fortin, int quad_degree = -1);

struct DofCensusRow {
  int dim = 0;
  int n = 0;
  Index vertices = 0;
  Index edges = 0;
  Index cells = 0;
  Index interior_vertices = 0;
  Index interior_edges = 0;
  Index dim_vh = 0;       ///< d (interior vertices + interior edges)
  Index dim_reduced = 0;  ///< d interior vertices + interior edges
  Index dim_mini = 0;     ///< d (interior vertices + cells), formula only
  Index dim_qh = 0;       ///< mean-zero P1 pressure dimension: vertices - 1
  Index dim_qh_rep = 0;   ///< nodal representation size: vertices
  double coeff_vh = 0;    ///< dim_vh / N^d, and likewise below
  double coeff_reduced = 0;
  double coeff_mini = 0;
  double coeff_qh = 0;
};

DofCensusRow dof_census(int dim, int n);

/// Asymptotic count / N^d coefficients (reduced, MINI, quadratic, pressure)
/// the census rows approach: (d + 2^d - 1, d (d! + 1), d 2^d, 1).
std::array<double, 4> census_reference_coefficients(int dim);

/// Least-squares slope of log(y) against log(x); pairs with y <= floor are
/// dropped. Returns false when fewer than 2 usable pairs remain.
bool fit_log_slope(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                   double floor_value = 1e-14);

}  // namespace thfortin
