#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thfortin/analysis.hpp"
#include "thfortin/reports.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace thfortin;

namespace {

std::shared_ptr<const Mesh> shared_mesh(Mesh mesh) {
  return std::make_shared<const Mesh>(std::move(mesh));
}

// Brute-force inf-sup value: dense Schur complement, mean constraint removed
// with a QR factor instead of the solver's deflation path.
double brute_force_beta(std::shared_ptr<const Mesh> mesh, SpaceKind velocity_kind,
                        SpaceKind pressure_kind) {
  auto velocity = make_space(mesh, velocity_kind);
  auto pressure = make_space(mesh, pressure_kind);
  const Eigen::MatrixXd a(
      assemble_operator(OperatorTag::stiffness, velocity, velocity).matrix);
  const Eigen::MatrixXd b(
      assemble_operator(OperatorTag::divergence, pressure, velocity).matrix);
  const Eigen::MatrixXd m(assemble_operator(OperatorTag::mass, pressure, pressure).matrix);

  const Eigen::MatrixXd schur = b * a.llt().solve(b.transpose());
  const Eigen::VectorXd g = m * Eigen::VectorXd::Ones(pressure->dim());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd y = q.rightCols(pressure->dim() - 1);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> pencil(
      y.transpose() * schur * y, y.transpose() * m * y);
  return std::sqrt(std::max(pencil.eigenvalues()[0], 0.0));
}

// A smooth zero-trace field whose frequency is incommensurate with the mesh
// spacing, so divergence moments carry a visible quadrature error.
std::shared_ptr<AnalyticField> rough_curl_field() {
  const double w = 2 * M_PI;
  auto f = [w](double t) { double s = std::sin(w * t); return s * s; };
  auto f1 = [w](double t) { return 2 * w * std::sin(w * t) * std::cos(w * t); };
  auto f2 = [w](double t) { return 2 * w * w * std::cos(2 * w * t); };
  return std::make_shared<AnalyticField>(
      2,
      [f, f1](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return Eigen::Vector2d(f(x[0]) * f1(x[1]), -f1(x[0]) * f(x[1]));
      },
      [f, f1, f2](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        Eigen::Matrix2d g;
        g << f1(x[0]) * f1(x[1]), f(x[0]) * f2(x[1]),
            -f2(x[0]) * f(x[1]), -f1(x[0]) * f1(x[1]);
        return g;
      });
}

// regression baselines, frozen from the first verified run
constexpr double kOctahedronP1Beta = 0.40824829046386307;  // = 1/sqrt(6)
constexpr double kReducedOperatorNorms[3] = {2.3147587509482825, 2.8186153207996214,
                                             3.1209368208494852};  // N = 2, 3, 4

}  // namespace

TEST_CASE("octahedron stable pair agrees with the brute force oracle") {
  auto mesh = shared_mesh(octahedron_basic());
  const InfSupReport report =
      infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P1Pressure);
  CHECK_FALSE(report.singular);
  CHECK(report.kernel_dim == 0);
  CHECK(report.beta > 0.05);
  const double oracle = brute_force_beta(mesh, SpaceKind::P2VectorZeroTrace,
                                         SpaceKind::P1Pressure);
  CHECK(report.beta == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(report.beta == doctest::Approx(kOctahedronP1Beta).epsilon(1e-11));
}

TEST_CASE("octahedron piecewise constants are unstable with the sign kernel") {
  auto mesh = shared_mesh(octahedron_basic());
  const InfSupReport report =
      infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P0Scalar);
  CHECK(report.singular);
  CHECK(report.kernel_dim == 1);
  CHECK(report.beta <= 1e-8);
  CHECK(std::abs(report.beta_squared) <= 1e-16 * report.lambda_max);

  const Eigen::VectorXd qbar = octahedron_sign_pressure(*mesh);
  const double cosine =
      std::abs(report.kernel.dot(qbar)) / (report.kernel.norm() * qbar.norm());
  CHECK(cosine >= 1 - 1e-10);
}

TEST_CASE("augmented pressure space stays rank deflated and unstable") {
  auto mesh = shared_mesh(octahedron_basic());
  const InfSupReport report =
      infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::AugmentedPressure);
  CHECK(report.n_pressure == 15);
  // gram rank 14 (one constant counted twice), minus the mean constraint
  CHECK(report.n_pressure_effective == 13);
  CHECK(report.singular);
  CHECK(report.kernel_dim >= 1);
}

TEST_CASE("kernel flag and beta threshold are consistent") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  const InfSupReport report =
      infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P1Pressure);
  CHECK(report.singular == (report.beta <= report.solver_tol));
  CHECK((report.kernel_dim >= 1) == report.singular);
  CHECK_FALSE(report.singular);
}

TEST_CASE("reduced velocity is no more stable than the full quadratic space") {
  struct Case {
    int dim, n;
  };
  for (const Case c : {Case{2, 2}, Case{2, 3}, Case{3, 2}}) {
    auto mesh = shared_mesh(freudenthal_cube(c.dim, c.n));
    const double beta_reduced =
        infsup_constant(mesh, SpaceKind::ReducedVelocityZeroTrace, SpaceKind::P1Pressure).beta;
    const double beta_full =
        infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P1Pressure).beta;
    CHECK(beta_reduced > 0);
    CHECK(beta_reduced <= beta_full + 1e-10);
  }
}

TEST_CASE("inf-sup constants are scale invariant") {
  const Mesh unit = freudenthal_cube(2, 2);
  auto mesh = shared_mesh(unit);
  Eigen::MatrixXd scaled_verts = unit.vertices * 2.0;
  auto scaled = shared_mesh(build_mesh(2, scaled_verts, unit.cells));
  for (SpaceKind velocity :
       {SpaceKind::P2VectorZeroTrace, SpaceKind::ReducedVelocityZeroTrace}) {
    const double beta_unit = infsup_constant(mesh, velocity, SpaceKind::P1Pressure).beta;
    const double beta_scaled = infsup_constant(scaled, velocity, SpaceKind::P1Pressure).beta;
    CHECK(std::abs(beta_unit - beta_scaled) <= 1e-10 * beta_unit);
  }
}

TEST_CASE("counterexample report") {
  const CounterexampleReport report = octahedron_counterexample();
  CHECK(std::abs(report.qbar_mean) <= 1e-15);
  CHECK(report.max_divergence_pairing <= 1e-12);
  CHECK(report.beta_p0 <= 1e-8);
  CHECK(report.beta_augmented <= 1e-8);
  CHECK(report.kernel_cosine >= 1 - 1e-10);
  CHECK(report.spot_check_error <= 1e-13);
  CHECK(std::abs(report.p0_report.beta_squared) <= 1e-16 * report.p0_report.lambda_max);
}

TEST_CASE("interpolation rates for a smooth divergence free field") {
  const auto field = make_sin_curl_field(2);
  const std::vector<int> ns = {2, 4, 8, 16};

  const ConvergenceReport th = convergence_study(
      *field, "sin curl", 3, FortinOperator::Variant::taylor_hood, 2, ns);
  REQUIRE(th.slopes_defined);
  CHECK(th.slope_l2 >= 2.7);
  CHECK(th.slope_l2 <= 3.3);
  CHECK(th.slope_h1 >= 1.7);
  CHECK(th.slope_h1 <= 2.3);

  const ConvergenceReport reduced = convergence_study(
      *field, "sin curl", 3, FortinOperator::Variant::reduced, 2, ns);
  REQUIRE(reduced.slopes_defined);
  CHECK(reduced.slope_l2 >= 1.7);
  CHECK(reduced.slope_l2 <= 2.3);
}

TEST_CASE("target space fields are reproduced on every mesh") {
  for (auto variant : {FortinOperator::Variant::taylor_hood, FortinOperator::Variant::reduced}) {
    const ConvergenceReport report = representable_study(variant, 2, {2, 3});
    CHECK(report.max_l2_error <= 1e-12);
    CHECK_FALSE(report.slopes_defined);
  }
}

TEST_CASE("analytic divergence residual shrinks with quadrature refinement") {
  auto mesh = shared_mesh(freudenthal_cube(2, 5));
  FortinOperator fortin(mesh, FortinOperator::Variant::taylor_hood);
  const auto field = rough_curl_field();
  const double r4 = divergence_residual(fortin, *field, 4).max_residual;
  const double r6 = divergence_residual(fortin, *field, 6).max_residual;
  const double r8 = divergence_residual(fortin, *field, 8).max_residual;
  CHECK(r4 > 1e-5);  // the coarse rule really is inexact here
  CHECK(r6 * 10 <= r4);
  CHECK(r8 * 10 <= r6);
}

TEST_CASE("discrete operator norms") {
  // The full-quadratic variant is a projection onto its own input space, so
  // its discrete norm is exactly one; the reduced variant maps the quadratic
  // space onto a strict subspace and its norm is a real measurement.
  std::vector<double> reduced_norms;
  for (int n : {2, 3, 4}) {
    auto mesh = shared_mesh(freudenthal_cube(2, n));
    const double full =
        fortin_operator_norm(FortinOperator(mesh, FortinOperator::Variant::taylor_hood));
    CHECK(std::abs(full - 1.0) <= 1e-9);
    reduced_norms.push_back(
        fortin_operator_norm(FortinOperator(mesh, FortinOperator::Variant::reduced)));
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(reduced_norms[i] == doctest::Approx(kReducedOperatorNorms[i]).epsilon(1e-9));
    CHECK(reduced_norms[i] > 1.0);
  }
  CHECK(reduced_norms[0] < reduced_norms[1]);
  CHECK(reduced_norms[1] < reduced_norms[2]);
}

TEST_CASE("dof census in 2d against closed forms") {
  for (int n : {1, 2, 3, 4}) {
    const DofCensusRow row = dof_census(2, n);
    CHECK(row.vertices == (n + 1) * (n + 1));
    CHECK(row.interior_vertices == (n - 1) * (n - 1));
    CHECK(row.interior_edges == 3 * n * n - 2 * n);
    CHECK(row.dim_reduced == 5 * n * n - 6 * n + 2);
    CHECK(row.dim_mini == 6 * n * n - 4 * n + 2);
    CHECK(row.dim_vh == 8 * n * n - 8 * n + 2);
    CHECK(row.dim_qh == n * n + 2 * n);
    CHECK(row.dim_qh_rep == row.vertices);
  }
}

TEST_CASE("dof census in 3d against enumerated counts") {
  const DofCensusRow row = dof_census(3, 2);
  CHECK(row.vertices == 27);
  CHECK(row.edges == 98);
  CHECK(row.cells == 48);
  CHECK(row.interior_vertices == 1);
  CHECK(row.interior_edges == 26);
  CHECK(row.dim_vh == 81);
  CHECK(row.dim_reduced == 29);
  CHECK(row.dim_mini == 147);
  CHECK(row.dim_qh == 26);
}

TEST_CASE("census reference coefficients") {
  const auto d2 = census_reference_coefficients(2);
  CHECK(d2[0] == 5);
  CHECK(d2[1] == 6);
  CHECK(d2[2] == 8);
  CHECK(d2[3] == 1);
  const auto d3 = census_reference_coefficients(3);
  CHECK(d3[0] == 10);
  CHECK(d3[1] == 21);
  CHECK(d3[2] == 24);
  CHECK(d3[3] == 1);
}

TEST_CASE("log slope fitting") {
  double slope = 0;
  REQUIRE(fit_log_slope({1.0, 0.5, 0.25}, {3.7, 3.7 * std::pow(0.5, 2.5),
                                           3.7 * std::pow(0.25, 2.5)},
                        slope));
  CHECK(slope == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_FALSE(fit_log_slope({1.0, 0.5}, {1e-15, 1e-16}, slope));
}

TEST_CASE("report serialization is deterministic") {
  auto mesh = shared_mesh(freudenthal_cube(2, 2));
  const InfSupReport report =
      infsup_constant(mesh, SpaceKind::P2VectorZeroTrace, SpaceKind::P1Pressure);
  InfSupRecord record;
  record.mesh_label = "freudenthal_cube(2,2)";
  record.dim = 2;
  record.n = 2;
  record.report = report;
  const ReportParams params = {{"dim", "2"}, {"n", "2"}};
  const std::string a = infsup_report_json(params, {record});
  const std::string b = infsup_report_json(params, {record});
  CHECK(a == b);
  CHECK(a.find("\"schema_version\": 1") != std::string::npos);
  CHECK(a.back() == '\n');

  const std::string csv = infsup_report_csv({record});
  CHECK(csv.find("mesh,dim,n,") == 0);
  CHECK(csv.find("freudenthal_cube(2,2)") != std::string::npos);
}

TEST_CASE("check records") {
  const CheckRecord good = make_check("alpha", 1e-14, 1e-12);
  const CheckRecord bad = make_check("beta", 2e-12, 1e-12);
  CHECK(good.passed);
  CHECK_FALSE(bad.passed);
  CHECK(all_passed({good}));
  CHECK_FALSE(all_passed({good, bad}));
  CHECK(first_failure({good, bad}) == "beta");
  CHECK(first_failure({good}).empty());
}
