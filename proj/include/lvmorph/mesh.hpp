#pragma once

#include <Eigen/Dense>

#include <string>

namespace lvm {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3>;
using Vec3 = Eigen::Vector3d;

/// Indexed triangle surface with per-vertex unit normals (outward for
/// closed meshes). Immutable by convention: operations return new meshes.
struct TriangleMesh {
    Points vertices;  // mm
    Faces faces;      // CCW when viewed from outside
    Points normals;   // unit length, derived from faces

    Eigen::Index vertex_count() const { return vertices.rows(); }
    Eigen::Index face_count() const { return faces.rows(); }
};

struct MeshReport {
    Eigen::Index vertex_count = 0;
    Eigen::Index face_count = 0;
    Eigen::Index edge_count = 0;
    long euler_characteristic = 0;  // V - E + F
    Eigen::Index boundary_edge_count = 0;
    Eigen::Index nonmanifold_edge_count = 0;
    Vec3 bbox_min = Vec3::Zero();
    Vec3 bbox_max = Vec3::Zero();
};

// Face area below this (mm^2) counts as degenerate.
inline constexpr double kDegenerateAreaTol = 1e-12;

/// Throws std::invalid_argument when a face index is out of range or a
/// face is degenerate (repeated index or near-zero area).
void validate_mesh(const Points& vertices, const Faces& faces);

/// Area-weighted average of incident face normals, normalized.
Points vertex_normals(const Points& vertices, const Faces& faces);

double face_area(const Points& vertices, const Faces& faces, Eigen::Index f);
Vec3 face_normal(const Points& vertices, const Faces& faces, Eigen::Index f);

/// Divergence-theorem signed volume; positive when faces wind CCW seen
/// from outside.
double signed_volume(const Points& vertices, const Faces& faces);

MeshReport mesh_report(const TriangleMesh& mesh);

bool is_closed(const TriangleMesh& mesh);

/// Validates, fixes orientation (closed meshes get positive signed
/// volume) and fills in normals.
TriangleMesh make_mesh(Points vertices, Faces faces);

/// v -> scale * R * v + t. R must be a rotation (RtR = I, det +1, within
/// 1e-9); scale must be positive.
TriangleMesh rigid_transform(const TriangleMesh& mesh, const Eigen::Matrix3d& rotation,
                             const Vec3& translation, double uniform_scale = 1.0);

}  // namespace lvm
