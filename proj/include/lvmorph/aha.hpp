#pragma once

#include "lvmorph/mesh.hpp"

#include <array>
#include <string>
#include <vector>

namespace lvm {

enum class Artery { LAD, RCA, LCX };

std::string artery_name(Artery a);

struct Landmarks {
    Vec3 apex = Vec3::Zero();           // mm
    Vec3 base_centroid = Vec3::Zero();  // mm
    std::array<Vec3, 3> septal{};       // mm
};

Landmarks landmarks_from_json(const std::string& path);

struct LongAxis {
    Vec3 direction = Vec3::UnitZ();  // unit, pointing base -> apex
    double extent = 0.0;             // mm span of the mesh along the axis
};

struct SegmentLabeling {
    std::vector<int> segment_of_vertex;              // 1..17
    std::array<std::vector<int>, 17> segment_vertices;  // [id-1]
};

/// With landmarks: normalize(apex - base centroid). Without: principal
/// eigenvector of the vertex covariance, oriented toward the farther
/// extreme; throws when the two leading eigenvalues are within 5% of each
/// other (eigenvalue ratio < 1.05) since the axis is then ambiguous.
LongAxis compute_long_axis(const TriangleMesh& mesh);
LongAxis compute_long_axis(const TriangleMesh& mesh, const Landmarks& landmarks);

/// The basal/mid/apical bands split the base-to-cap span into equal
/// thirds; the apex cap (segment 17) is the most distal 15% of the axial
/// extent. Circumferential sectors (6/6/4) are anchored at the projection
/// of the first septal landmark.
SegmentLabeling partition_17(const TriangleMesh& mesh, const Landmarks& landmarks);

/// Fixed AHA territory map: LAD {1,2,7,8,13,14,17}, RCA {3,4,9,10,15},
/// LCX {5,6,11,12,16}.
Artery territory_of(int segment_id);

void save_labeling_csv(const SegmentLabeling& labeling, const std::string& path);
SegmentLabeling load_labeling_csv(const std::string& path);

}  // namespace lvm
