#include "thfortin/mesh_io.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace thfortin {

using nlohmann::json;

std::string mesh_to_json_string(const Mesh& mesh) {
  json j;
  j["dim"] = mesh.dim;
  auto& verts = j["vertices"] = json::array();
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    json p = json::array();
    for (int k = 0; k < mesh.dim; ++k) p.push_back(mesh.vertices(k, v));
    verts.push_back(std::move(p));
  }
  j["cells"] = mesh.cells;
  return j.dump(2) + "\n";
}

Mesh mesh_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("mesh JSON parse error: ") + e.what());
  }
  if (!j.contains("dim") || !j.contains("vertices") || !j.contains("cells"))
    throw std::invalid_argument("mesh JSON must contain dim, vertices and cells");

  const int dim = j["dim"].get<int>();
  const auto& jverts = j["vertices"];
  Eigen::MatrixXd vertices(dim, jverts.size());
  for (std::size_t v = 0; v < jverts.size(); ++v) {
    if (static_cast<int>(jverts[v].size()) != dim)
      throw std::invalid_argument("mesh JSON: vertex " + std::to_string(v) +
                                  " does not have dim coordinates");
    for (int k = 0; k < dim; ++k) vertices(k, v) = jverts[v][k].get<double>();
  }
  auto cells = j["cells"].get<std::vector<std::vector<Index>>>();
  return build_mesh(dim, std::move(vertices), std::move(cells));
}

void write_mesh_json(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << mesh_to_json_string(mesh);
}

Mesh read_mesh_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return mesh_from_json_string(text);
}

}  // namespace thfortin
