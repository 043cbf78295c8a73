#include "lvmorph/smoothing.hpp"

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace lvm {

TriangleMesh smooth_mesh(const TriangleMesh& mesh, int normal_iterations, int vertex_iterations) {
    if (normal_iterations < 0 || vertex_iterations < 0)
        throw std::invalid_argument("iteration counts must be >= 0");
    if (normal_iterations == 0 && vertex_iterations == 0) return mesh;

    const Eigen::Index nf = mesh.face_count();
    const Eigen::Index nv = mesh.vertex_count();

    // Edge-adjacent face pairs.
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (Eigen::Index f = 0; f < nf; ++f) {
        for (int e = 0; e < 3; ++e) {
            int a = mesh.faces(f, e), b = mesh.faces(f, (e + 1) % 3);
            if (a > b) std::swap(a, b);
            edge_faces[{a, b}].push_back(static_cast<int>(f));
        }
    }
    std::vector<std::vector<int>> face_neighbors(nf);
    for (const auto& [edge, fs] : edge_faces)
        for (size_t i = 0; i < fs.size(); ++i)
            for (size_t j = 0; j < fs.size(); ++j)
                if (i != j) face_neighbors[fs[i]].push_back(fs[j]);

    Points fnormals(nf, 3);
    Eigen::VectorXd areas(nf);
    for (Eigen::Index f = 0; f < nf; ++f) {
        fnormals.row(f) = face_normal(mesh.vertices, mesh.faces, f);
        areas[f] = face_area(mesh.vertices, mesh.faces, f);
    }

    for (int it = 0; it < normal_iterations; ++it) {
        Points next(nf, 3);
        for (Eigen::Index f = 0; f < nf; ++f) {
            Vec3 acc = areas[f] * fnormals.row(f).transpose();
            for (int g : face_neighbors[f]) acc += areas[g] * fnormals.row(g).transpose();
            const double len = acc.norm();
            if (len > 0)
                next.row(f) = (acc / len).transpose();
            else
                next.row(f) = fnormals.row(f);
        }
        fnormals = next;
    }

    std::vector<std::vector<int>> vertex_faces(nv);
    for (Eigen::Index f = 0; f < nf; ++f)
        for (int k = 0; k < 3; ++k) vertex_faces[mesh.faces(f, k)].push_back(static_cast<int>(f));
    size_t max_degree = 1;
    for (const auto& vf : vertex_faces) max_degree = std::max(max_degree, vf.size());
    const double step = 1.0 / (3.0 * static_cast<double>(max_degree));

    Points V = mesh.vertices;
    for (int it = 0; it < vertex_iterations; ++it) {
        Points next = V;
        for (Eigen::Index v = 0; v < nv; ++v) {
            Vec3 delta = Vec3::Zero();
            for (int f : vertex_faces[v]) {
                const Vec3 c = (V.row(mesh.faces(f, 0)) + V.row(mesh.faces(f, 1)) + V.row(mesh.faces(f, 2))) / 3.0;
                const Vec3 n = fnormals.row(f);
                delta += n * n.dot(c - V.row(v).transpose());
            }
            next.row(v) += (step * delta).transpose();
        }
        V = next;
    }

    TriangleMesh out;
    out.vertices = std::move(V);
    out.faces = mesh.faces;
    out.normals = vertex_normals(out.vertices, out.faces);
    return out;
}

}  // namespace lvm
