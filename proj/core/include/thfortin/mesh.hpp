#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace thfortin {

using Index = std::int32_t;

/// Conforming simplicial mesh of a polytopal domain in R^d, d >= 2.
///
/// Cells store their vertex indices in ascending order; edges are unordered
/// pairs {i, j} stored with i < j, faces are the (d-1)-dimensional facets
/// stored as sorted d-tuples. Edge and face numbering is lexicographic in the
/// vertex tuples, so it is deterministic and independent of cell ordering.
/// All connectivity below is derived once by build_mesh(); a Mesh is
/// immutable afterwards.
struct Mesh {
  int dim = 0;
  Eigen::MatrixXd vertices;                   ///< dim x n_vertices, one point per column
  std::vector<std::vector<Index>> cells;      ///< each ascending, size dim+1

  std::vector<std::array<Index, 2>> edges;    ///< {i, j} with i < j, lexicographically sorted
  std::vector<std::vector<Index>> faces;      ///< sorted d-tuples, lexicographically sorted

  std::vector<std::vector<Index>> cell_edges; ///< cell -> edge ids, local pair order (0,1),(0,2),...
  std::vector<std::array<Index, 2>> face_cells; ///< face -> incident cells, second is -1 on the boundary
  std::vector<std::vector<Index>> vertex_cells; ///< vertex -> incident cells, ascending
  std::vector<std::vector<Index>> edge_cells;   ///< edge -> incident cells, ascending

  std::vector<bool> vertex_on_boundary;
  std::vector<bool> edge_on_boundary;
  std::vector<Index> interior_vertices;       ///< ascending
  std::vector<Index> interior_edges;          ///< ascending
  std::vector<Index> vertex_interior_slot;    ///< position in interior_vertices, -1 for boundary
  std::vector<Index> edge_interior_slot;      ///< position in interior_edges, -1 for boundary

  Eigen::VectorXd cell_volumes;
  Eigen::VectorXd cell_diameters;
  double shape_regularity = 0;                ///< max over cells of diameter / inradius
  double total_volume = 0;

  int n_vertices() const { return static_cast<int>(vertices.cols()); }
  int n_cells() const { return static_cast<int>(cells.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }
  int n_interior_vertices() const { return static_cast<int>(interior_vertices.size()); }
  int n_interior_edges() const { return static_cast<int>(interior_edges.size()); }
  int n_boundary_faces() const;

  /// Edge id of {a, b} in either order, or -1 if no such edge exists.
  Index find_edge(Index a, Index b) const;

  Eigen::VectorXd vertex(Index v) const { return vertices.col(v); }

  std::unordered_map<std::int64_t, Index> edge_lookup; ///< key = min * n_vertices + max
};

/// Per-cell affine geometry: vertex coordinates, constant barycentric
/// gradients and the cell volume.
struct CellGeometry {
  Eigen::MatrixXd verts;   ///< dim x (dim+1)
  Eigen::MatrixXd grads;   ///< (dim+1) x dim, row k = gradient of barycentric coordinate k
  double volume = 0;

  /// Physical point of barycentric coordinates lambda (size dim+1).
  Eigen::VectorXd point(const Eigen::VectorXd& lambda) const { return verts * lambda; }
  /// Barycentric coordinates of a physical point.
  Eigen::VectorXd barycentric(const Eigen::VectorXd& x) const;
};

CellGeometry cell_geometry(const Mesh& mesh, Index cell);

/// Local vertex pair (a, b), a < b, of local edge le in the order used by
/// Mesh::cell_edges: (0,1), (0,2), ..., (0,dim), (1,2), ...
inline std::array<int, 2> local_edge_vertices(int dim, int le) {
  for (int a = 0, k = 0; a <= dim; ++a)
    for (int b = a + 1; b <= dim; ++b, ++k)
      if (k == le) return {a, b};
  return {-1, -1};
}

/// Validates vertices/cells, derives all connectivity and geometry.
/// Throws std::invalid_argument on out-of-range indices, degenerate
/// (zero-volume) cells or a facet shared by more than two cells.
Mesh build_mesh(int dim, Eigen::MatrixXd vertices, std::vector<std::vector<Index>> cells);

/// Kuhn-triangulated unit cube (0,1)^dim with an n x ... x n grid of subcubes,
/// each split into dim! simplices along the permutation chains. Subcubes in
/// the last layer of each coordinate direction are mirrored in that
/// coordinate; this keeps the tiling conforming, leaves all entity counts
/// unchanged, and guarantees for n >= 2 that every cell touches an interior
/// vertex (the plain translated tiling strands the corners of the cube that
/// mix 0 and 1 coordinates with no interior neighbor at any n).
Mesh freudenthal_cube(int dim, int n);

/// conv{+-e1, +-e2, +-e3} split into its 8 coordinate octants; the origin is
/// the only interior vertex.
Mesh octahedron_basic();

struct AssumptionReport {
  bool satisfied = false;
  std::vector<Index> cells_without_interior_vertex;
};

/// Does every cell contain at least one interior vertex?
AssumptionReport check_interior_node_assumption(const Mesh& mesh);

enum class PatchKind { node_patch, edge_patch, node_neighborhood, edge_neighborhood };

struct PatchSet {
  PatchKind kind;
  std::vector<Index> cells;  ///< ascending, no duplicates
  double measure = 0;
};

/// Cells containing vertex v.
PatchSet node_patch(const Mesh& mesh, Index v);
/// Cells containing edge {a, b}; throws if {a, b} is not a mesh edge.
PatchSet edge_patch(const Mesh& mesh, Index a, Index b);
/// Cells sharing at least one vertex with the seed cells.
PatchSet node_neighborhood(const Mesh& mesh, const std::vector<Index>& seed_cells);
/// Cells sharing at least one edge with the seed cells.
PatchSet edge_neighborhood(const Mesh& mesh, const std::vector<Index>& seed_cells);

/// Cell containing x (barycentric coordinates >= -tol), or -1. Linear scan.
Index locate_cell(const Mesh& mesh, const Eigen::VectorXd& x, double tol = 1e-12);

/// k-dimensional measure of the simplex spanned by the k+1 columns of points.
double simplex_measure(const Eigen::MatrixXd& points);

}  // namespace thfortin
