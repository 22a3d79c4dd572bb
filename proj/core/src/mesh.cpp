#include "thfortin/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace thfortin {

namespace {

std::int64_t edge_key(Index a, Index b, Index n_vertices) {
  if (a > b) std::swap(a, b);
  return static_cast<std::int64_t>(a) * n_vertices + b;
}

double factorial(int n) {
  double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double simplex_volume(const Eigen::MatrixXd& pts) {
  const int d = static_cast<int>(pts.rows());
  Eigen::MatrixXd m(d, d);
  for (int c = 0; c < d; ++c) m.col(c) = pts.col(c + 1) - pts.col(0);
  return std::abs(m.determinant()) / factorial(d);
}

}  // namespace

double simplex_measure(const Eigen::MatrixXd& pts) {
  const int k = static_cast<int>(pts.cols()) - 1;
  Eigen::MatrixXd e(pts.rows(), k);
  for (int c = 0; c < k; ++c) e.col(c) = pts.col(c + 1) - pts.col(0);
  const Eigen::MatrixXd gram = e.transpose() * e;
  const double det = gram.determinant();
  return det <= 0 ? 0.0 : std::sqrt(det) / factorial(k);
}

int Mesh::n_boundary_faces() const {
  int n = 0;
  for (const auto& fc : face_cells) n += (fc[1] < 0) ? 1 : 0;
  return n;
}

Index Mesh::find_edge(Index a, Index b) const {
  if (a == b) return -1;
  const auto it = edge_lookup.find(edge_key(a, b, n_vertices()));
  return it == edge_lookup.end() ? -1 : it->second;
}

CellGeometry cell_geometry(const Mesh& mesh, Index cell) {
  const int d = mesh.dim;
  const auto& cv = mesh.cells.at(cell);
  CellGeometry g;
  g.verts.resize(d, d + 1);
  for (int a = 0; a <= d; ++a) g.verts.col(a) = mesh.vertices.col(cv[a]);
  Eigen::MatrixXd m(d, d);
  for (int c = 0; c < d; ++c) m.col(c) = g.verts.col(c + 1) - g.verts.col(0);
  const Eigen::MatrixXd minv = m.inverse();
  g.grads.resize(d + 1, d);
  for (int k = 1; k <= d; ++k) g.grads.row(k) = minv.row(k - 1);
  g.grads.row(0) = -g.grads.bottomRows(d).colwise().sum();
  g.volume = mesh.cell_volumes[cell];
  return g;
}

Eigen::VectorXd CellGeometry::barycentric(const Eigen::VectorXd& x) const {
  const int d = static_cast<int>(verts.rows());
  Eigen::VectorXd lambda(d + 1);
  lambda.tail(d) = grads.bottomRows(d) * (x - verts.col(0));
  lambda[0] = 1.0 - lambda.tail(d).sum();
  return lambda;
}

Mesh build_mesh(int dim, Eigen::MatrixXd vertices, std::vector<std::vector<Index>> cells) {
  if (dim < 2) throw std::invalid_argument("build_mesh: dim must be >= 2, got " + std::to_string(dim));
  if (vertices.rows() != dim)
    throw std::invalid_argument("build_mesh: vertex array has " + std::to_string(vertices.rows()) +
                                " rows, expected dim = " + std::to_string(dim));

  Mesh m;
  m.dim = dim;
  m.vertices = std::move(vertices);
  const Index nv = m.n_vertices();

  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& cell = cells[c];
    if (static_cast<int>(cell.size()) != dim + 1)
      throw std::invalid_argument("build_mesh: cell " + std::to_string(c) + " has " +
                                  std::to_string(cell.size()) + " vertices, expected " +
                                  std::to_string(dim + 1));
    for (Index v : cell)
      if (v < 0 || v >= nv)
        throw std::invalid_argument("build_mesh: cell " + std::to_string(c) +
                                    " references vertex " + std::to_string(v) +
                                    " outside [0, " + std::to_string(nv) + ")");
    std::sort(cell.begin(), cell.end());
    if (std::adjacent_find(cell.begin(), cell.end()) != cell.end())
      throw std::invalid_argument("build_mesh: cell " + std::to_string(c) + " repeats a vertex");
  }
  m.cells = std::move(cells);
  const Index nc = m.n_cells();

  // Geometry first so degenerate cells are reported before connectivity work.
  m.cell_volumes.resize(nc);
  m.cell_diameters.resize(nc);
  m.total_volume = 0;
  double worst_shape = 0;
  Eigen::MatrixXd pts(dim, dim + 1);
  for (Index c = 0; c < nc; ++c) {
    for (int a = 0; a <= dim; ++a) pts.col(a) = m.vertices.col(m.cells[c][a]);
    double diam = 0;
    for (int a = 0; a <= dim; ++a)
      for (int b = a + 1; b <= dim; ++b) diam = std::max(diam, (pts.col(a) - pts.col(b)).norm());
    const double vol = simplex_volume(pts);
    const double scale = std::pow(diam, dim) / factorial(dim);
    if (vol <= 1e-12 * scale || diam <= 0)
      throw std::invalid_argument("build_mesh: cell " + std::to_string(c) +
                                  " is degenerate (volume " + std::to_string(vol) + ")");
    m.cell_volumes[c] = vol;
    m.cell_diameters[c] = diam;
    m.total_volume += vol;

    double surface = 0;
    Eigen::MatrixXd facet(dim, dim);
    for (int skip = 0; skip <= dim; ++skip) {
      int col = 0;
      for (int a = 0; a <= dim; ++a)
        if (a != skip) facet.col(col++) = pts.col(a);
      surface += simplex_measure(facet);
    }
    const double inradius = dim * vol / surface;
    worst_shape = std::max(worst_shape, diam / inradius);
  }
  m.shape_regularity = worst_shape;

  // Faces (facets): canonical sorted tuples in lexicographic order.
  std::map<std::vector<Index>, std::vector<Index>> face_map;  // face -> incident cells
  std::vector<Index> face(dim);
  for (Index c = 0; c < nc; ++c) {
    for (int skip = 0; skip <= dim; ++skip) {
      int k = 0;
      for (int a = 0; a <= dim; ++a)
        if (a != skip) face[k++] = m.cells[c][a];
      auto& inc = face_map[face];
      if (inc.size() >= 2)
        throw std::invalid_argument("build_mesh: facet of cell " + std::to_string(c) +
                                    " is shared by more than two cells (mesh is not conforming)");
      inc.push_back(c);
    }
  }
  m.faces.reserve(face_map.size());
  m.face_cells.reserve(face_map.size());
  for (auto& [key, inc] : face_map) {
    m.faces.push_back(key);
    m.face_cells.push_back({inc[0], inc.size() > 1 ? inc[1] : Index{-1}});
  }

  // Edges: canonical pairs in lexicographic order.
  std::set<std::array<Index, 2>> edge_set;
  for (const auto& cell : m.cells)
    for (int a = 0; a <= dim; ++a)
      for (int b = a + 1; b <= dim; ++b) edge_set.insert({cell[a], cell[b]});
  m.edges.assign(edge_set.begin(), edge_set.end());
  for (Index e = 0; e < m.n_edges(); ++e)
    m.edge_lookup.emplace(edge_key(m.edges[e][0], m.edges[e][1], nv), e);

  m.cell_edges.resize(nc);
  for (Index c = 0; c < nc; ++c) {
    const auto& cell = m.cells[c];
    for (int a = 0; a <= dim; ++a)
      for (int b = a + 1; b <= dim; ++b) m.cell_edges[c].push_back(m.find_edge(cell[a], cell[b]));
  }

  // Boundary classification: a facet is boundary iff it has one incident
  // cell, a vertex/edge is boundary iff it lies in a boundary facet.
  m.vertex_on_boundary.assign(nv, false);
  m.edge_on_boundary.assign(m.n_edges(), false);
  for (Index f = 0; f < m.n_faces(); ++f) {
    if (m.face_cells[f][1] >= 0) continue;
    const auto& fv = m.faces[f];
    for (Index v : fv) m.vertex_on_boundary[v] = true;
    for (std::size_t a = 0; a < fv.size(); ++a)
      for (std::size_t b = a + 1; b < fv.size(); ++b)
        m.edge_on_boundary[m.find_edge(fv[a], fv[b])] = true;
  }

  m.vertex_interior_slot.assign(nv, -1);
  for (Index v = 0; v < nv; ++v)
    if (!m.vertex_on_boundary[v]) {
      m.vertex_interior_slot[v] = static_cast<Index>(m.interior_vertices.size());
      m.interior_vertices.push_back(v);
    }
  m.edge_interior_slot.assign(m.n_edges(), -1);
  for (Index e = 0; e < m.n_edges(); ++e)
    if (!m.edge_on_boundary[e]) {
      m.edge_interior_slot[e] = static_cast<Index>(m.interior_edges.size());
      m.interior_edges.push_back(e);
    }

  m.vertex_cells.resize(nv);
  for (Index c = 0; c < nc; ++c)
    for (Index v : m.cells[c]) m.vertex_cells[v].push_back(c);
  m.edge_cells.resize(m.n_edges());
  for (Index c = 0; c < nc; ++c)
    for (Index e : m.cell_edges[c]) m.edge_cells[e].push_back(c);
  for (auto& ec : m.edge_cells) {
    std::sort(ec.begin(), ec.end());
    ec.erase(std::unique(ec.begin(), ec.end()), ec.end());
  }

  return m;
}

Mesh freudenthal_cube(int dim, int n) {
  if (dim < 2) throw std::invalid_argument("freudenthal_cube: dim must be >= 2");
  if (n < 1) throw std::invalid_argument("freudenthal_cube: n must be >= 1");

  const int side = n + 1;
  Index nv = 1;
  for (int k = 0; k < dim; ++k) nv *= side;

  Eigen::MatrixXd vertices(dim, nv);
  {
    std::vector<int> idx(dim, 0);
    for (Index v = 0; v < nv; ++v) {
      for (int k = 0; k < dim; ++k) vertices(k, v) = static_cast<double>(idx[k]) / n;
      for (int k = 0; k < dim; ++k) {
        if (++idx[k] < side) break;
        idx[k] = 0;
      }
    }
  }
  const auto vertex_id = [&](const std::vector<int>& g) {
    Index id = 0;
    for (int k = dim - 1; k >= 0; --k) id = id * side + g[k];
    return id;
  };

  std::vector<std::vector<Index>> cells;
  std::vector<int> perm(dim);
  std::vector<int> offset(dim, 0);
  std::vector<int> local(dim), global(dim);
  const Index n_cubes = static_cast<Index>(std::pow(n, dim) + 0.5);
  for (Index cube = 0; cube < n_cubes; ++cube) {
    std::vector<bool> flip(dim);
    for (int k = 0; k < dim; ++k) flip[k] = (offset[k] == n - 1);

    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<Index> cell(dim + 1);
      std::fill(local.begin(), local.end(), 0);
      for (int step = 0; step <= dim; ++step) {
        if (step > 0) local[perm[step - 1]] = 1;
        for (int k = 0; k < dim; ++k)
          global[k] = offset[k] + (flip[k] ? 1 - local[k] : local[k]);
        cell[step] = vertex_id(global);
      }
      cells.push_back(std::move(cell));
    } while (std::next_permutation(perm.begin(), perm.end()));

    for (int k = 0; k < dim; ++k) {
      if (++offset[k] < n) break;
      offset[k] = 0;
    }
  }

  return build_mesh(dim, std::move(vertices), std::move(cells));
}

Mesh octahedron_basic() {
  Eigen::MatrixXd vertices(3, 7);
  vertices.col(0) = Eigen::Vector3d(0, 0, 0);
  vertices.col(1) = Eigen::Vector3d(1, 0, 0);
  vertices.col(2) = Eigen::Vector3d(-1, 0, 0);
  vertices.col(3) = Eigen::Vector3d(0, 1, 0);
  vertices.col(4) = Eigen::Vector3d(0, -1, 0);
  vertices.col(5) = Eigen::Vector3d(0, 0, 1);
  vertices.col(6) = Eigen::Vector3d(0, 0, -1);

  std::vector<std::vector<Index>> cells;
  for (int sx = 0; sx < 2; ++sx)
    for (int sy = 0; sy < 2; ++sy)
      for (int sz = 0; sz < 2; ++sz)
        cells.push_back({0, Index(1 + sx), Index(3 + sy), Index(5 + sz)});

  return build_mesh(3, std::move(vertices), std::move(cells));
}

AssumptionReport check_interior_node_assumption(const Mesh& mesh) {
  AssumptionReport report;
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    bool has_interior = false;
    for (Index v : mesh.cells[c]) has_interior |= !mesh.vertex_on_boundary[v];
    if (!has_interior) report.cells_without_interior_vertex.push_back(c);
  }
  report.satisfied = report.cells_without_interior_vertex.empty();
  return report;
}

namespace {

PatchSet make_patch(const Mesh& mesh, PatchKind kind, std::vector<Index> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  double measure = 0;
  for (Index c : cells) measure += mesh.cell_volumes[c];
  return PatchSet{kind, std::move(cells), measure};
}

}  // namespace

PatchSet node_patch(const Mesh& mesh, Index v) {
  if (v < 0 || v >= mesh.n_vertices())
    throw std::invalid_argument("node_patch: vertex " + std::to_string(v) + " out of range");
  return make_patch(mesh, PatchKind::node_patch, mesh.vertex_cells[v]);
}

PatchSet edge_patch(const Mesh& mesh, Index a, Index b) {
  const Index e = mesh.find_edge(a, b);
  if (e < 0)
    throw std::invalid_argument("edge_patch: {" + std::to_string(a) + ", " + std::to_string(b) +
                                "} is not an edge of the mesh");
  return make_patch(mesh, PatchKind::edge_patch, mesh.edge_cells[e]);
}

PatchSet node_neighborhood(const Mesh& mesh, const std::vector<Index>& seed_cells) {
  std::vector<Index> out;
  for (Index c : seed_cells)
    for (Index v : mesh.cells.at(c))
      out.insert(out.end(), mesh.vertex_cells[v].begin(), mesh.vertex_cells[v].end());
  return make_patch(mesh, PatchKind::node_neighborhood, std::move(out));
}

PatchSet edge_neighborhood(const Mesh& mesh, const std::vector<Index>& seed_cells) {
  std::vector<Index> out;
  for (Index c : seed_cells)
    for (Index e : mesh.cell_edges.at(c))
      out.insert(out.end(), mesh.edge_cells[e].begin(), mesh.edge_cells[e].end());
  return make_patch(mesh, PatchKind::edge_neighborhood, std::move(out));
}

Index locate_cell(const Mesh& mesh, const Eigen::VectorXd& x, double tol) {
  for (Index c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::VectorXd lambda = cell_geometry(mesh, c).barycentric(x);
    if ((lambda.array() >= -tol).all()) return c;
  }
  return -1;
}

}  // namespace thfortin
