#pragma once

#include "lvmorph/mesh.hpp"

namespace lvm {

/// Two-stage mean face normal filter. Stage one repeatedly replaces each
/// face normal with the area-weighted mean of the normals of the face and
/// its edge-adjacent faces, renormalized. Stage two moves vertices by
/// gradient steps that rotate the incident faces toward the filtered
/// normals; the step size is 1/(3 * max vertex degree). Connectivity and
/// vertex/face counts are unchanged; zero iterations is the identity.
TriangleMesh smooth_mesh(const TriangleMesh& mesh, int normal_iterations, int vertex_iterations);

}  // namespace lvm
