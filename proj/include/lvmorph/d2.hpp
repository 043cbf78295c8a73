#pragma once

#include "lvmorph/mesh.hpp"

#include <cstdint>
#include <vector>

namespace lvm {

/// Histogram of Euclidean distances between random vertex pairs,
/// normalized by the mean pairwise distance so the descriptor is scale
/// free; support [0, 3 * mean].
struct D2Histogram {
    std::vector<double> frequencies;  // sums to 1
    double mean_distance = 0.0;       // mm, the normalization constant
};

D2Histogram d2_descriptor(const Points& vertices, int n_pairs, int bins, std::uint64_t seed);
D2Histogram d2_descriptor(const TriangleMesh& mesh, int n_pairs, int bins, std::uint64_t seed);

}  // namespace lvm
