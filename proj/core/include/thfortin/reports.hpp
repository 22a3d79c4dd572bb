#pragma once

#include "thfortin/analysis.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace thfortin {

/// All JSON documents carry this version and are rendered byte-identically
/// for identical inputs (two-space indent, sorted flag echo, trailing
/// newline).
inline constexpr int kReportSchemaVersion = 1;

/// Echo of the resolved command-line flags, in the order given.
using ReportParams = std::vector<std::pair<std::string, std::string>>;

struct CheckRecord {
  std::string name;
  double value = 0;
  double tolerance = 0;
  bool passed = false;
};

CheckRecord make_check(std::string name, double value, double tolerance);
bool all_passed(const std::vector<CheckRecord>& checks);
/// Name of the first failing record, or an empty string.
std::string first_failure(const std::vector<CheckRecord>& checks);

struct MeshSummary {
  int dim = 0;
  Index vertices = 0;
  Index edges = 0;
  Index faces = 0;
  Index cells = 0;
  Index interior_vertices = 0;
  Index interior_edges = 0;
  Index boundary_faces = 0;
  double total_volume = 0;
  double shape_regularity = 0;
  double max_diameter = 0;
};

MeshSummary summarize_mesh(const Mesh& mesh);

struct InfSupRecord {
  std::string mesh_label;
  int dim = 0;
  int n = 0;  ///< refinement parameter, 0 for file meshes
  InfSupReport report;
};

std::string mesh_summary_json(const ReportParams& params, const MeshSummary& summary);
std::string check_report_json(const std::string& command, const ReportParams& params,
                              const std::vector<CheckRecord>& checks);
std::string infsup_report_json(const ReportParams& params,
                               const std::vector<InfSupRecord>& records);
std::string infsup_report_csv(const std::vector<InfSupRecord>& records);
std::string convergence_report_json(const ReportParams& params,
                                    const std::vector<ConvergenceReport>& reports);
std::string convergence_report_csv(const std::vector<ConvergenceReport>& reports);
std::string census_report_json(const ReportParams& params,
                               const std::vector<DofCensusRow>& rows,
                               const std::array<double, 4>& reference);
std::string census_report_csv(const std::vector<DofCensusRow>& rows);
std::string counterexample_report_json(const ReportParams& params,
                                       const CounterexampleReport& report);

}  // namespace thfortin
