#include "lvmorph/mesh.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace lvm {

namespace {

std::map<std::pair<int, int>, int> edge_use_counts(const Faces& faces) {
    std::map<std::pair<int, int>, int> counts;
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        for (int e = 0; e < 3; ++e) {
            int a = faces(f, e);
            int b = faces(f, (e + 1) % 3);
            if (a > b) std::swap(a, b);
            ++counts[{a, b}];
        }
    }
    return counts;
}

}  // namespace

void validate_mesh(const Points& vertices, const Faces& faces) {
    const int vcount = static_cast<int>(vertices.rows());
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
        if (a < 0 || b < 0 || c < 0 || a >= vcount || b >= vcount || c >= vcount)
            throw std::invalid_argument("face " + std::to_string(f) + ": vertex index out of range");
        if (a == b || b == c || a == c)
            throw std::invalid_argument("face " + std::to_string(f) + ": repeated vertex index");
        if (face_area(vertices, faces, f) <= kDegenerateAreaTol)
            throw std::invalid_argument("face " + std::to_string(f) + ": degenerate (near-zero area)");
    }
}

double face_area(const Points& vertices, const Faces& faces, Eigen::Index f) {
    const Vec3 p0 = vertices.row(faces(f, 0));
    const Vec3 p1 = vertices.row(faces(f, 1));
    const Vec3 p2 = vertices.row(faces(f, 2));
    return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

Vec3 face_normal(const Points& vertices, const Faces& faces, Eigen::Index f) {
    const Vec3 p0 = vertices.row(faces(f, 0));
    const Vec3 p1 = vertices.row(faces(f, 1));
    const Vec3 p2 = vertices.row(faces(f, 2));
    Vec3 n = (p1 - p0).cross(p2 - p0);
    const double len = n.norm();
    if (len > 0) n /= len;
    return n;
}

Points vertex_normals(const Points& vertices, const Faces& faces) {
    Points normals = Points::Zero(vertices.rows(), 3);
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        const Vec3 p0 = vertices.row(faces(f, 0));
        const Vec3 p1 = vertices.row(faces(f, 1));
        const Vec3 p2 = vertices.row(faces(f, 2));
        const Vec3 an = 0.5 * (p1 - p0).cross(p2 - p0);  // area-weighted
        for (int k = 0; k < 3; ++k) normals.row(faces(f, k)) += an.transpose();
    }
    for (Eigen::Index v = 0; v < normals.rows(); ++v) {
        const double len = normals.row(v).norm();
        if (len > 0) normals.row(v) /= len;
    }
    return normals;
}

double signed_volume(const Points& vertices, const Faces& faces) {
    double vol = 0.0;
    for (Eigen::Index f = 0; f < faces.rows(); ++f) {
        const Vec3 p0 = vertices.row(faces(f, 0));
        const Vec3 p1 = vertices.row(faces(f, 1));
        const Vec3 p2 = vertices.row(faces(f, 2));
        vol += p0.dot(p1.cross(p2)) / 6.0;
    }
    return vol;
}

MeshReport mesh_report(const TriangleMesh& mesh) {
    MeshReport r;
    r.vertex_count = mesh.vertex_count();
    r.face_count = mesh.face_count();
    const auto edges = edge_use_counts(mesh.faces);
    r.edge_count = static_cast<Eigen::Index>(edges.size());
    for (const auto& [edge, uses] : edges) {
        if (uses == 1) ++r.boundary_edge_count;
        if (uses > 2) ++r.nonmanifold_edge_count;
    }
    r.euler_characteristic = static_cast<long>(r.vertex_count) - static_cast<long>(r.edge_count) +
                             static_cast<long>(r.face_count);
    if (mesh.vertex_count() > 0) {
        r.bbox_min = mesh.vertices.colwise().minCoeff();
        r.bbox_max = mesh.vertices.colwise().maxCoeff();
    }
    return r;
}

bool is_closed(const TriangleMesh& mesh) {
    for (const auto& [edge, uses] : edge_use_counts(mesh.faces))
        if (uses != 2) return false;
    return mesh.face_count() > 0;
}

TriangleMesh make_mesh(Points vertices, Faces faces) {
    validate_mesh(vertices, faces);
    TriangleMesh mesh{std::move(vertices), std::move(faces), Points()};
    if (is_closed(mesh) && signed_volume(mesh.vertices, mesh.faces) < 0)
        mesh.faces.col(1).swap(mesh.faces.col(2));
    mesh.normals = vertex_normals(mesh.vertices, mesh.faces);
    return mesh;
}

TriangleMesh rigid_transform(const TriangleMesh& mesh, const Eigen::Matrix3d& rotation,
                             const Vec3& translation, double uniform_scale) {
    if (((rotation.transpose() * rotation) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
        rotation.determinant() < 0)
        throw std::invalid_argument("rotation must be orthonormal with determinant +1");
    if (!(uniform_scale > 0)) throw std::invalid_argument("uniform_scale must be positive");

    TriangleMesh out;
    out.faces = mesh.faces;
    out.vertices = uniform_scale * (mesh.vertices * rotation.transpose());
    out.vertices.rowwise() += translation.transpose();
    out.normals = mesh.normals * rotation.transpose();
    return out;
}

}  // namespace lvm
