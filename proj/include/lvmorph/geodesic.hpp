#pragma once

#include "lvmorph/mesh.hpp"

#include <vector>

namespace lvm {

/// Shortest-path distances (mm) over the edge graph with Euclidean edge
/// weights, Dijkstra with early exit once every target is settled.
/// Throws when a target is unreachable from the source.
std::vector<double> geodesic_distances(const TriangleMesh& mesh, int source_vertex,
                                       const std::vector<int>& target_vertices);

}  // namespace lvm
