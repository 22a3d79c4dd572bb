#pragma once

#include "thfortin/mesh.hpp"

#include <string>

namespace thfortin {

/// Mesh file format: {"dim": d, "vertices": [[...], ...], "cells": [[...], ...]}
/// with 0-based vertex indices. The writer is deterministic, so a read/write
/// cycle of a generated mesh reproduces the file byte for byte.
std::string mesh_to_json_string(const Mesh& mesh);
Mesh mesh_from_json_string(const std::string& text);

void write_mesh_json(const Mesh& mesh, const std::string& path);
Mesh read_mesh_json(const std::string& path);

}  // namespace thfortin
