#pragma once

#include "lvmorph/mesh.hpp"

#include <vector>

namespace lvm {

/// Per-vertex principal curvatures, kappa1 >= kappa2 (1/mm). Convex-
/// toward-outward-normal regions are positive: a unit sphere with outward
/// normals carries kappa = +1/r everywhere.
struct CurvatureField {
    Eigen::VectorXd kappa1;
    Eigen::VectorXd kappa2;
    std::vector<bool> valid;  // false where the local fit is underdetermined
};

/// Least-squares quadric fit h(u,v) = a u^2 + b uv + c v^2 over the
/// ring_depth-ring neighborhood in the vertex tangent frame; principal
/// curvatures from the shape operator of the fit. Vertices with fewer
/// than 5 neighbors are flagged invalid.
CurvatureField estimate_curvatures(const TriangleMesh& mesh, int ring_depth = 2);

/// Koenderink shape index in [0,1]. Umbilic points (k1 == k2 != 0)
/// resolve by limit: positive -> 0, negative -> 1; the flat point maps to
/// 0.5 by convention. Requires k1 >= k2.
double shape_index(double kappa1, double kappa2);

/// Root-mean-square of the principal curvatures; >= 0.
double curvedness(double kappa1, double kappa2);

/// Angle between a unit normal and the XZ-plane: asin(|n_y|) in [0,pi/2].
double normal_orientation(const Vec3& unit_normal);

/// Vertex adjacency up to ring_depth rings (excluding the vertex itself).
std::vector<int> ring_neighborhood(const std::vector<std::vector<int>>& adjacency, int vertex,
                                   int ring_depth);
std::vector<std::vector<int>> vertex_adjacency(const TriangleMesh& mesh);

}  // namespace lvm
