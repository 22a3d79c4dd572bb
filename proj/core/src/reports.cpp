#include "thfortin/reports.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace thfortin {

namespace {

using Json = nlohmann::ordered_json;

Json params_json(const ReportParams& params) {
  Json out = Json::object();
  for (const auto& [key, value] : params) out[key] = value;
  return out;
}

Json header(const std::string& command, const ReportParams& params) {
  Json doc = Json::object();
  doc["schema_version"] = kReportSchemaVersion;
  doc["command"] = command;
  doc["params"] = params_json(params);
  return doc;
}

std::string render(const Json& doc) { return doc.dump(2) + "\n"; }

Json infsup_json(const InfSupReport& report) {
  Json out = Json::object();
  out["velocity_space"] = report.velocity_space;
  out["pressure_space"] = report.pressure_space;
  out["n_velocity"] = report.n_velocity;
  out["n_pressure"] = report.n_pressure;
  out["n_pressure_effective"] = report.n_pressure_effective;
  out["beta"] = report.beta;
  out["beta_squared"] = report.beta_squared;
  out["lambda_max"] = report.lambda_max;
  out["spectrum_head"] = report.spectrum_head;
  out["kernel_dim"] = report.kernel_dim;
  out["singular"] = report.singular;
  out["solver_tol"] = report.solver_tol;
  out["kernel"] = std::vector<double>(report.kernel.begin(), report.kernel.end());
  return out;
}

class CsvWriter {
 public:
  CsvWriter() { stream_ << std::setprecision(17); }

  template <typename T>
  CsvWriter& field(const T& value) {
    if (!first_) stream_ << ',';
    stream_ << value;
    first_ = false;
    return *this;
  }
  void end_row() {
    stream_ << '\n';
    first_ = true;
  }
  std::string str() const { return stream_.str(); }

 private:
  std::ostringstream stream_;
  bool first_ = true;
};

}  // namespace

CheckRecord make_check(std::string name, double value, double tolerance) {
  CheckRecord record;
  record.name = std::move(name);
  record.value = value;
  record.tolerance = tolerance;
  record.passed = value <= tolerance;
  return record;
}

bool all_passed(const std::vector<CheckRecord>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.passed; });
}

std::string first_failure(const std::vector<CheckRecord>& checks) {
  for (const auto& check : checks)
    if (!check.passed) return check.name;
  return {};
}

MeshSummary summarize_mesh(const Mesh& mesh) {
  MeshSummary out;
  out.dim = mesh.dim;
  out.vertices = mesh.n_vertices();
  out.edges = mesh.n_edges();
  out.faces = static_cast<Index>(mesh.faces.size());
  out.cells = mesh.n_cells();
  out.interior_vertices = static_cast<Index>(mesh.interior_vertices.size());
  out.interior_edges = static_cast<Index>(mesh.interior_edges.size());
  Index boundary_faces = 0;
  for (const auto& fc : mesh.face_cells)
    if (fc[1] < 0) ++boundary_faces;
  out.boundary_faces = boundary_faces;
  out.total_volume = mesh.total_volume;
  out.shape_regularity = mesh.shape_regularity;
  out.max_diameter =
      *std::max_element(mesh.cell_diameters.begin(), mesh.cell_diameters.end());
  return out;
}

std::string mesh_summary_json(const ReportParams& params, const MeshSummary& summary) {
  Json doc = header("mesh", params);
  doc["dim"] = summary.dim;
  doc["vertices"] = summary.vertices;
  doc["edges"] = summary.edges;
  doc["faces"] = summary.faces;
  doc["cells"] = summary.cells;
  doc["interior_vertices"] = summary.interior_vertices;
  doc["interior_edges"] = summary.interior_edges;
  doc["boundary_faces"] = summary.boundary_faces;
  doc["total_volume"] = summary.total_volume;
  doc["shape_regularity"] = summary.shape_regularity;
  doc["max_diameter"] = summary.max_diameter;
  return render(doc);
}

std::string check_report_json(const std::string& command, const ReportParams& params,
                              const std::vector<CheckRecord>& checks) {
  Json doc = header(command, params);
  Json list = Json::array();
  for (const auto& check : checks) {
    Json entry = Json::object();
    entry["name"] = check.name;
    entry["value"] = check.value;
    entry["tolerance"] = check.tolerance;
    entry["passed"] = check.passed;
    list.push_back(entry);
  }
  doc["checks"] = list;
  doc["passed"] = all_passed(checks);
  return render(doc);
}

std::string infsup_report_json(const ReportParams& params,
                               const std::vector<InfSupRecord>& records) {
  Json doc = header("infsup", params);
  Json list = Json::array();
  for (const auto& record : records) {
    Json entry = Json::object();
    entry["mesh"] = record.mesh_label;
    entry["dim"] = record.dim;
    entry["n"] = record.n;
    entry.update(infsup_json(record.report));
    list.push_back(entry);
  }
  doc["records"] = list;
  return render(doc);
}

std::string infsup_report_csv(const std::vector<InfSupRecord>& records) {
  CsvWriter csv;
  csv.field("mesh").field("dim").field("n").field("velocity_space").field("pressure_space");
  csv.field("n_velocity").field("n_pressure").field("beta").field("beta_squared");
  csv.field("kernel_dim").field("singular");
  csv.end_row();
  for (const auto& record : records) {
    csv.field(record.mesh_label).field(record.dim).field(record.n);
    csv.field(record.report.velocity_space).field(record.report.pressure_space);
    csv.field(record.report.n_velocity).field(record.report.n_pressure);
    csv.field(record.report.beta).field(record.report.beta_squared);
    csv.field(record.report.kernel_dim).field(record.report.singular ? 1 : 0);
    csv.end_row();
  }
  return csv.str();
}

std::string convergence_report_json(const ReportParams& params,
                                    const std::vector<ConvergenceReport>& reports) {
  Json doc = header("convergence", params);
  Json list = Json::array();
  for (const auto& report : reports) {
    Json entry = Json::object();
    entry["variant"] = report.variant;
    entry["field"] = report.field_description;
    entry["smoothness"] = report.smoothness;
    Json rows = Json::array();
    for (const auto& row : report.rows) {
      Json r = Json::object();
      r["n"] = row.n;
      r["h"] = row.h;
      r["l2_error"] = row.l2_error;
      r["h1_error"] = row.h1_error;
      rows.push_back(r);
    }
    entry["rows"] = rows;
    entry["slopes_defined"] = report.slopes_defined;
    entry["slope_l2"] = report.slope_l2;
    entry["slope_h1"] = report.slope_h1;
    entry["max_l2_error"] = report.max_l2_error;
    list.push_back(entry);
  }
  doc["reports"] = list;
  return render(doc);
}

std::string convergence_report_csv(const std::vector<ConvergenceReport>& reports) {
  CsvWriter csv;
  csv.field("variant").field("field").field("n").field("h").field("l2_error").field("h1_error");
  csv.end_row();
  for (const auto& report : reports)
    for (const auto& row : report.rows) {
      csv.field(report.variant).field(report.field_description);
      csv.field(row.n).field(row.h).field(row.l2_error).field(row.h1_error);
      csv.end_row();
    }
  return csv.str();
}

std::string census_report_json(const ReportParams& params,
                               const std::vector<DofCensusRow>& rows,
                               const std::array<double, 4>& reference) {
  Json doc = header("dof-table", params);
  Json list = Json::array();
  for (const auto& row : rows) {
    Json entry = Json::object();
    entry["dim"] = row.dim;
    entry["n"] = row.n;
    entry["vertices"] = row.vertices;
    entry["edges"] = row.edges;
    entry["cells"] = row.cells;
    entry["interior_vertices"] = row.interior_vertices;
    entry["interior_edges"] = row.interior_edges;
    entry["dim_reduced"] = row.dim_reduced;
    entry["dim_mini"] = row.dim_mini;
    entry["dim_vh"] = row.dim_vh;
    entry["dim_qh"] = row.dim_qh;
    entry["dim_qh_rep"] = row.dim_qh_rep;
    entry["coeff_reduced"] = row.coeff_reduced;
    entry["coeff_mini"] = row.coeff_mini;
    entry["coeff_vh"] = row.coeff_vh;
    entry["coeff_qh"] = row.coeff_qh;
    list.push_back(entry);
  }
  doc["records"] = list;
  Json ref = Json::object();
  ref["reduced"] = reference[0];
  ref["mini"] = reference[1];
  ref["vh"] = reference[2];
  ref["qh"] = reference[3];
  doc["reference_coefficients"] = ref;
  return render(doc);
}

std::string census_report_csv(const std::vector<DofCensusRow>& rows) {
  CsvWriter csv;
  csv.field("dim").field("n").field("vertices").field("edges").field("cells");
  csv.field("interior_vertices").field("interior_edges");
  csv.field("dim_reduced").field("dim_mini").field("dim_vh").field("dim_qh").field("dim_qh_rep");
  csv.field("coeff_reduced").field("coeff_mini").field("coeff_vh").field("coeff_qh");
  csv.end_row();
  for (const auto& row : rows) {
    csv.field(row.dim).field(row.n).field(row.vertices).field(row.edges).field(row.cells);
    csv.field(row.interior_vertices).field(row.interior_edges);
    csv.field(row.dim_reduced).field(row.dim_mini).field(row.dim_vh).field(row.dim_qh);
    csv.field(row.dim_qh_rep);
    csv.field(row.coeff_reduced).field(row.coeff_mini).field(row.coeff_vh).field(row.coeff_qh);
    csv.end_row();
  }
  return csv.str();
}

std::string counterexample_report_json(const ReportParams& params,
                                       const CounterexampleReport& report) {
  Json doc = header("counterexample", params);
  doc["qbar_mean"] = report.qbar_mean;
  doc["max_divergence_pairing"] = report.max_divergence_pairing;
  doc["beta_p0"] = report.beta_p0;
  doc["beta_augmented"] = report.beta_augmented;
  doc["kernel_cosine"] = report.kernel_cosine;
  doc["spot_check_error"] = report.spot_check_error;
  doc["p0"] = infsup_json(report.p0_report);
  doc["augmented"] = infsup_json(report.augmented_report);
  return render(doc);
}

}  // namespace thfortin
