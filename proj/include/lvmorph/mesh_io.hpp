#pragma once

#include "lvmorph/mesh.hpp"

#include <string>

namespace lvm {

enum class MeshFormat { OFF, PLY, OBJ };

/// Picks the format from the file extension; throws on unknown ones.
MeshFormat format_from_path(const std::string& path);

/// ASCII readers only; binary PLY is rejected with a clear error.
/// The loaded mesh is validated and its normals recomputed.
TriangleMesh load_mesh(const std::string& path, MeshFormat format);
TriangleMesh load_mesh(const std::string& path);

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format);
void save_mesh(const TriangleMesh& mesh, const std::string& path);

}  // namespace lvm
