// Command-line driver: mesh generation, identity sweeps, inf-sup and
// convergence studies, DOF tables, and the octahedron counterexample.
// Reports are deterministic JSON (schema_version header) or CSV; identical
// flags produce byte-identical output.

#include "thfortin/analysis.hpp"
#include "thfortin/assembly.hpp"
#include "thfortin/bubbles.hpp"
#include "thfortin/fortin.hpp"
#include "thfortin/mesh.hpp"
#include "thfortin/mesh_io.hpp"
#include "thfortin/reports.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <vector>

using namespace thfortin;

namespace {

constexpr double kKernelCosineTol = 1e-10;
constexpr double kAnalyticDivergenceTol = 1e-8;

struct Options {
  int dim = 2;
  std::vector<int> ns;
  std::string mesh_file;
  std::string variant = "th";
  std::string pressure = "p1";
  int quad_degree = 6;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  double tol_identity = 1e-12;
  double tol_beta = 1e-8;
  double slope_window = 0.3;
  std::string matrix_out;
};

struct NamedMesh {
  std::string label;
  int n = 0;  // 0 for file meshes
  std::shared_ptr<const Mesh> mesh;
};

FortinOperator::Variant parse_variant(const std::string& name) {
  return name == "reduced" ? FortinOperator::Variant::reduced
                           : FortinOperator::Variant::taylor_hood;
}

SpaceKind velocity_kind(const std::string& variant) {
  return variant == "reduced" ? SpaceKind::ReducedVelocityZeroTrace
                              : SpaceKind::P2VectorZeroTrace;
}

SpaceKind pressure_kind(const std::string& name) {
  if (name == "p0") return SpaceKind::P0Scalar;
  if (name == "augmented") return SpaceKind::AugmentedPressure;
  return SpaceKind::P1Pressure;
}

std::string join_ns(const std::vector<int>& ns) {
  std::string text;
  for (std::size_t i = 0; i < ns.size(); ++i)
    text += (i ? "," : "") + std::to_string(ns[i]);
  return text;
}

std::vector<NamedMesh> resolve_meshes(const Options& opt) {
  std::vector<NamedMesh> meshes;
  if (!opt.mesh_file.empty()) {
    meshes.push_back({"file:" + opt.mesh_file, 0,
                      std::make_shared<const Mesh>(read_mesh_json(opt.mesh_file))});
    return meshes;
  }
  for (int n : opt.ns) {
    meshes.push_back(
        {"freudenthal_cube(" + std::to_string(opt.dim) + "," + std::to_string(n) + ")", n,
         std::make_shared<const Mesh>(freudenthal_cube(opt.dim, n))});
  }
  return meshes;
}

ReportParams mesh_params(const Options& opt) {
  ReportParams params;
  if (opt.mesh_file.empty()) {
    params.emplace_back("dim", std::to_string(opt.dim));
    params.emplace_back("n", join_ns(opt.ns));
  } else {
    params.emplace_back("mesh_file", opt.mesh_file);
  }
  return params;
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream stream(opt.out, std::ios::binary);
  if (!stream) throw std::runtime_error("cannot write " + opt.out);
  stream << text;
}

int finish_checks(const std::string& command, const Options& opt, const ReportParams& params,
                  const std::vector<CheckRecord>& checks) {
  emit(opt, check_report_json(command, params, checks));
  if (all_passed(checks)) return 0;
  std::fprintf(stderr, "%s: check failed: %s\n", command.c_str(),
               first_failure(checks).c_str());
  return 1;
}

int run_mesh(const Options& opt) {
  const std::vector<NamedMesh> meshes = resolve_meshes(opt);
  const NamedMesh& named = meshes.front();
  if (!opt.out.empty()) write_mesh_json(*named.mesh, opt.out);
  ReportParams params = mesh_params(opt);
  params.emplace_back("mesh", named.label);
  std::fputs(mesh_summary_json(params, summarize_mesh(*named.mesh)).c_str(), stdout);
  return 0;
}

int run_verify_bubbles(const Options& opt) {
  double worst_raw = 0;
  double worst_unit = 0;
  double worst_moment = 0;
  double worst_split = 0;
  for (const NamedMesh& named : resolve_meshes(opt)) {
    const Mesh& mesh = *named.mesh;
    const double unit_factor = 1.0 / ((mesh.dim + 1.0) * (mesh.dim + 2.0));
    std::map<Index, Eigen::VectorXd> cache;
    for (Index e = 0; e < static_cast<Index>(mesh.edges.size()); ++e) {
      const auto [a, b] = mesh.edges[e];
      const double measure = edge_patch(mesh, a, b).measure;
      const Eigen::VectorXd raw = bubble_divergence_pairings(mesh, a, b, false, 3);
      for (Index k = 0; k < raw.size(); ++k) {
        const double expected = measure * unit_factor * ((k == a) - (k == b));
        worst_raw = std::max(worst_raw, std::abs(raw[k] - expected));
      }
      const ModifiedBubble psi = modified_bubble(mesh, a, b);
      Eigen::VectorXd unit = Eigen::VectorXd::Zero(mesh.n_vertices());
      for (const auto& [interior_edge, coefficient] : psi.edge_coefficients) {
        auto it = cache.find(interior_edge);
        if (it == cache.end()) {
          const auto& [p, q] = mesh.edges[interior_edge];
          it = cache.emplace(interior_edge, bubble_divergence_pairings(mesh, p, q, true, 3))
                   .first;
        }
        unit += coefficient * it->second;
      }
      for (Index k = 0; k < unit.size(); ++k) {
        const double expected = static_cast<double>(k == a) - (k == b);
        worst_unit = std::max(worst_unit, std::abs(unit[k] - expected));
      }
    }

    auto mesh_ptr = named.mesh;
    auto hats = make_space(mesh_ptr, SpaceKind::P1Pressure);
    auto velocity = make_space(mesh_ptr, SpaceKind::P2VectorFull);
    auto velocity_zt = make_space(mesh_ptr, SpaceKind::P2VectorZeroTrace);
    auto bubbles = make_space(mesh_ptr, SpaceKind::EdgeBubble);
    const DivergenceCorrection correction(bubbles);
    const Eigen::SparseMatrix<double> embed = zero_trace_embedding(*velocity_zt, *velocity);
    const Eigen::MatrixXd b_velocity =
        assemble_operator(OperatorTag::divergence, hats, velocity).matrix;
    const Eigen::MatrixXd b_bubbles =
        assemble_operator(OperatorTag::divergence, hats, bubbles).matrix;
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd coeffs =
          embed * random_coefficients(velocity_zt->dim(), opt.seed + 13 * trial);
      const DiscreteField v(velocity, coeffs);
      const Eigen::VectorXd per_edge = correction.apply(v);
      worst_split = std::max(
          worst_split, (per_edge - correction.apply_per_node(v)).lpNorm<Eigen::Infinity>());
      worst_moment = std::max(worst_moment, (b_bubbles * per_edge - b_velocity * coeffs)
                                                .lpNorm<Eigen::Infinity>());
    }
  }
  const std::vector<CheckRecord> checks = {
      make_check("raw_pairing_formula", worst_raw, opt.tol_identity),
      make_check("unit_pairings", worst_unit, opt.tol_identity),
      make_check("correction_moments", worst_moment, opt.tol_identity),
      make_check("per_node_agreement", worst_split, opt.tol_identity),
  };
  return finish_checks("verify-bubbles", opt, mesh_params(opt), checks);
}

int run_fortin_check(const Options& opt) {
  double worst_projection = 0;
  double worst_idempotence = 0;
  double worst_boundary = 0;
  double worst_discrete = 0;
  double worst_analytic = 0;
  bool analytic_ran = false;
  for (const NamedMesh& named : resolve_meshes(opt)) {
    const FortinOperator fortin(named.mesh, parse_variant(opt.variant));
    const auto& target = *fortin.target_space();
    const auto& target_zt = *fortin.target_zero_trace_space();
    const Eigen::SparseMatrix<double> embed_target = zero_trace_embedding(target_zt, target);
    const Eigen::SparseMatrix<double> lift =
        parse_variant(opt.variant) == FortinOperator::Variant::reduced
            ? reduced_to_p2_embedding(target, *fortin.input_space())
            : Eigen::SparseMatrix<double>();
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd want =
          embed_target * random_coefficients(target_zt.dim(), opt.seed + 41 * trial);
      const Eigen::VectorXd input_coeffs =
          lift.size() > 0 ? Eigen::VectorXd(lift * want) : want;
      const DiscreteField v(fortin.input_space(), input_coeffs);
      const Eigen::VectorXd got = fortin.apply(v);
      worst_projection = std::max(worst_projection, (got - want).lpNorm<Eigen::Infinity>());
      for (Index dof : target.boundary_dofs())
        worst_boundary = std::max(worst_boundary, std::abs(got[dof]));
      worst_discrete = std::max(worst_discrete, divergence_residual(fortin, v).max_residual);

      const Eigen::VectorXd lifted_once = lift.size() > 0 ? Eigen::VectorXd(lift * got) : got;
      const DiscreteField again(fortin.input_space(), lifted_once);
      worst_idempotence = std::max(
          worst_idempotence, (fortin.apply(again) - got).lpNorm<Eigen::Infinity>());
    }
    if (named.n > 0) {  // generated unit-cube mesh: the bump field has zero trace
      const auto bump = make_box_bump_field(named.mesh->dim);
      const int degree = std::max(8, opt.quad_degree);
      worst_analytic =
          std::max(worst_analytic, divergence_residual(fortin, *bump, degree).max_residual);
      analytic_ran = true;
    }
    if (!opt.matrix_out.empty()) {
      write_matrix_market(fortin.matrix(), opt.matrix_out + ".pi.mtx");
      write_matrix_market(fortin.smoothing().matrix(*fortin.input_space()),
                          opt.matrix_out + ".smoothing.mtx");
      write_matrix_market(fortin.correction().matrix(*fortin.input_space()),
                          opt.matrix_out + ".correction.mtx");
    }
  }
  ReportParams params = mesh_params(opt);
  params.emplace_back("variant", opt.variant);
  params.emplace_back("quad_degree", std::to_string(opt.quad_degree));
  params.emplace_back("seed", std::to_string(opt.seed));
  std::vector<CheckRecord> checks = {
      make_check("projection", worst_projection, opt.tol_identity),
      make_check("idempotence", worst_idempotence, opt.tol_identity),
      make_check("boundary_trace", worst_boundary, 0.0),
      make_check("discrete_divergence", worst_discrete, opt.tol_identity),
  };
  if (analytic_ran)
    checks.push_back(make_check("analytic_divergence", worst_analytic, kAnalyticDivergenceTol));
  return finish_checks("fortin-check", opt, params, checks);
}

int run_infsup(const Options& opt) {
  std::vector<InfSupRecord> records;
  for (const NamedMesh& named : resolve_meshes(opt)) {
    InfSupRecord record;
    record.mesh_label = named.label;
    record.dim = named.mesh->dim;
    record.n = named.n;
    record.report = infsup_constant(named.mesh, velocity_kind(opt.variant),
                                    pressure_kind(opt.pressure), opt.tol_beta, opt.quad_degree);
    records.push_back(std::move(record));
  }
  ReportParams params = mesh_params(opt);
  params.emplace_back("variant", opt.variant);
  params.emplace_back("pressure", opt.pressure);
  params.emplace_back("quad_degree", std::to_string(opt.quad_degree));
  emit(opt, opt.format == "csv" ? infsup_report_csv(records)
                                : infsup_report_json(params, records));
  for (const InfSupRecord& record : records) {
    if (record.report.singular) {
      std::fprintf(stderr, "infsup: singular pair on %s (beta %.3e <= %.1e)\n",
                   record.mesh_label.c_str(), record.report.beta, opt.tol_beta);
      return 1;
    }
  }
  return 0;
}

int run_convergence(const Options& opt) {
  const auto field = make_sin_curl_field(opt.dim);
  const FortinOperator::Variant variant = parse_variant(opt.variant);
  const ConvergenceReport report = convergence_study(*field, "sin curl", 3, variant, opt.dim,
                                                     opt.ns, std::max(opt.quad_degree, 6));
  ReportParams params = mesh_params(opt);
  params.emplace_back("variant", opt.variant);
  params.emplace_back("quad_degree", std::to_string(opt.quad_degree));
  emit(opt, opt.format == "csv" ? convergence_report_csv({report})
                                : convergence_report_json(params, {report}));
  if (!report.slopes_defined) {
    std::fprintf(stderr, "convergence: slopes undefined (need >= 2 meshes above noise)\n");
    return 1;
  }
  const double expected_l2 = variant == FortinOperator::Variant::taylor_hood ? 3.0 : 2.0;
  std::vector<CheckRecord> checks = {
      make_check("l2_slope", std::abs(report.slope_l2 - expected_l2), opt.slope_window)};
  if (variant == FortinOperator::Variant::taylor_hood)
    checks.push_back(make_check("h1_slope", std::abs(report.slope_h1 - 2.0), opt.slope_window));
  if (!all_passed(checks)) {
    std::fprintf(stderr, "convergence: check failed: %s\n", first_failure(checks).c_str());
    return 1;
  }
  return 0;
}

int run_dof_table(const Options& opt) {
  std::vector<DofCensusRow> rows;
  for (int n : opt.ns) rows.push_back(dof_census(opt.dim, n));
  ReportParams params = mesh_params(opt);
  emit(opt, opt.format == "csv"
                ? census_report_csv(rows)
                : census_report_json(params, rows, census_reference_coefficients(opt.dim)));
  return 0;
}

int run_counterexample(const Options& opt) {
  const CounterexampleReport report = octahedron_counterexample(opt.seed);
  ReportParams params = {{"seed", std::to_string(opt.seed)}};
  emit(opt, counterexample_report_json(params, report));
  const std::vector<CheckRecord> checks = {
      make_check("divergence_pairings", report.max_divergence_pairing, opt.tol_identity),
      make_check("beta_p0", report.beta_p0, opt.tol_beta),
      make_check("beta_augmented", report.beta_augmented, opt.tol_beta),
      make_check("kernel_cosine_deficit", 1 - report.kernel_cosine, kKernelCosineTol),
      make_check("spot_checks", report.spot_check_error, opt.tol_identity),
  };
  if (!all_passed(checks)) {
    std::fprintf(stderr, "counterexample: check failed: %s\n", first_failure(checks).c_str());
    return 1;
  }
  return 0;
}

void add_mesh_flags(CLI::App* cmd, Options& opt, bool with_file) {
  cmd->add_option("--dim", opt.dim, "space dimension")->check(CLI::Range(2, 6));
  auto* n_opt = cmd->add_option("--n", opt.ns, "grid subdivisions (comma list)")
                    ->delimiter(',')
                    ->check(CLI::PositiveNumber);
  if (with_file) {
    auto* file_opt =
        cmd->add_option("--mesh-file", opt.mesh_file, "mesh JSON file instead of a generator");
    file_opt->excludes(n_opt);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Taylor-Hood Fortin operator toolbox"};
  app.require_subcommand(1);
  Options opt;

  app.add_option("--quad-degree", opt.quad_degree, "quadrature degree for assembly checks")
      ->check(CLI::Range(1, 13));
  app.add_option("--seed", opt.seed, "seed for random discrete fields");
  app.add_option("--out", opt.out, "write the report (or mesh JSON) to this path");
  app.add_option("--format", opt.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--variant", opt.variant, "velocity target space")
      ->check(CLI::IsMember({"th", "reduced"}));
  app.add_option("--pressure", opt.pressure, "pressure space for inf-sup runs")
      ->check(CLI::IsMember({"p1", "p0", "augmented"}));
  app.add_option("--tol-identity", opt.tol_identity, "tolerance for exact identities");
  app.add_option("--tol-beta", opt.tol_beta, "inf-sup singularity threshold");
  app.add_option("--slope-window", opt.slope_window, "allowed deviation from expected rates");

  auto* mesh_cmd = app.add_subcommand("mesh", "generate or load a mesh; print topology stats");
  add_mesh_flags(mesh_cmd, opt, true);
  auto* bubbles_cmd =
      app.add_subcommand("verify-bubbles", "divergence pairing identity sweep over all edges");
  add_mesh_flags(bubbles_cmd, opt, true);
  auto* fortin_cmd = app.add_subcommand(
      "fortin-check", "projection, trace, and divergence residuals of the composed operator");
  add_mesh_flags(fortin_cmd, opt, true);
  fortin_cmd->add_option("--matrix-out", opt.matrix_out,
                         "prefix for MatrixMarket exports of the operator matrices");
  auto* infsup_cmd = app.add_subcommand("infsup", "inf-sup constants via the deflated pencil");
  add_mesh_flags(infsup_cmd, opt, true);
  auto* conv_cmd =
      app.add_subcommand("convergence", "interpolation error study on a smooth field");
  add_mesh_flags(conv_cmd, opt, false);
  auto* dof_cmd = app.add_subcommand("dof-table", "DOF census over a mesh family");
  add_mesh_flags(dof_cmd, opt, false);
  auto* counter_cmd =
      app.add_subcommand("counterexample", "octahedron checkerboard instability report");
  for (auto* cmd : app.get_subcommands(nullptr)) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage/help text
    return e.get_name() == "CallForHelp" ? 0 : 2;
  }

  if (opt.ns.empty()) {
    if (infsup_cmd->parsed()) opt.ns = {2, 3, 4};
    else if (conv_cmd->parsed()) opt.ns = {2, 4, 8, 16};
    else if (dof_cmd->parsed()) opt.ns = {1, 2, 4, 8};
    else opt.ns = {2};
  }

  try {
    if (mesh_cmd->parsed()) return run_mesh(opt);
    if (bubbles_cmd->parsed()) return run_verify_bubbles(opt);
    if (fortin_cmd->parsed()) return run_fortin_check(opt);
    if (infsup_cmd->parsed()) return run_infsup(opt);
    if (conv_cmd->parsed()) return run_convergence(opt);
    if (dof_cmd->parsed()) return run_dof_table(opt);
    if (counter_cmd->parsed()) return run_counterexample(opt);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
