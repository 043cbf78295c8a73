#pragma once

#include "lvmorph/mesh.hpp"
#include "lvmorph/volume.hpp"

namespace lvm {

/// Standard 256-case marching cubes with linear interpolation along cell
/// edges. Vertices come out in physical (mm) coordinates; vertices shared
/// between cells are welded through a grid-edge key. An iso value outside
/// the volume's range yields an empty mesh. Triangles are wound so faces
/// point toward lower scalar values (outward for inside-negative fields).
TriangleMesh extract_isosurface(const ScalarVolume& volume, double iso_value);

}  // namespace lvm
