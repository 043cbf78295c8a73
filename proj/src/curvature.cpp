#include "lvmorph/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lvm {

std::vector<std::vector<int>> vertex_adjacency(const TriangleMesh& mesh) {
    std::vector<std::vector<int>> adj(static_cast<size_t>(mesh.vertex_count()));
    for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
        for (int e = 0; e < 3; ++e) {
            const int a = mesh.faces(f, e), b = mesh.faces(f, (e + 1) % 3);
            adj[static_cast<size_t>(a)].push_back(b);
            adj[static_cast<size_t>(b)].push_back(a);
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

std::vector<int> ring_neighborhood(const std::vector<std::vector<int>>& adjacency, int vertex,
                                   int ring_depth) {
    std::vector<int> frontier{vertex};
    std::vector<int> depth_of(adjacency.size(), -1);
    depth_of[static_cast<size_t>(vertex)] = 0;
    std::vector<int> result;
    for (int ring = 1; ring <= ring_depth && !frontier.empty(); ++ring) {
        std::vector<int> next;
        for (int v : frontier) {
            for (int w : adjacency[static_cast<size_t>(v)]) {
                if (depth_of[static_cast<size_t>(w)] < 0) {
                    depth_of[static_cast<size_t>(w)] = ring;
                    next.push_back(w);
                    result.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    return result;
}

CurvatureField estimate_curvatures(const TriangleMesh& mesh, int ring_depth) {
    if (ring_depth < 1) throw std::invalid_argument("ring_depth must be >= 1");
    const Eigen::Index nv = mesh.vertex_count();
    CurvatureField field;
    field.kappa1 = Eigen::VectorXd::Zero(nv);
    field.kappa2 = Eigen::VectorXd::Zero(nv);
    field.valid.assign(static_cast<size_t>(nv), false);

    const auto adjacency = vertex_adjacency(mesh);

    for (Eigen::Index v = 0; v < nv; ++v) {
        const auto neighbors = ring_neighborhood(adjacency, static_cast<int>(v), ring_depth);
        if (neighbors.size() < 5) continue;

        const Vec3 p = mesh.vertices.row(v);
        const Vec3 n = mesh.normals.row(v);
        // Tangent frame
        Vec3 e1 = std::abs(n.x()) < 0.9 ? Vec3::UnitX().cross(n) : Vec3::UnitY().cross(n);
        e1.normalize();
        const Vec3 e2 = n.cross(e1);

        Eigen::MatrixXd A(static_cast<Eigen::Index>(neighbors.size()), 3);
        Eigen::VectorXd h(static_cast<Eigen::Index>(neighbors.size()));
        for (size_t i = 0; i < neighbors.size(); ++i) {
            const Vec3 d = mesh.vertices.row(neighbors[i]).transpose() - p;
            const double u = d.dot(e1), w = d.dot(e2);
            A(static_cast<Eigen::Index>(i), 0) = u * u;
            A(static_cast<Eigen::Index>(i), 1) = u * w;
            A(static_cast<Eigen::Index>(i), 2) = w * w;
            h(static_cast<Eigen::Index>(i)) = d.dot(n);
        }
        const Eigen::Vector3d coeff = A.colPivHouseholderQr().solve(h);

        // Height is measured along the outward normal, so the shape
        // operator carries the opposite sign of the fitted Hessian.
        Eigen::Matrix2d shape_op;
        shape_op << -2.0 * coeff[0], -coeff[1], -coeff[1], -2.0 * coeff[2];
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shape_op);
        field.kappa1[v] = es.eigenvalues()[1];
        field.kappa2[v] = es.eigenvalues()[0];
        field.valid[static_cast<size_t>(v)] = true;
    }
    return field;
}

double shape_index(double kappa1, double kappa2) {
    if (kappa1 < kappa2) throw std::invalid_argument("shape_index requires kappa1 >= kappa2");
    if (kappa1 == kappa2) {
        if (kappa1 > 0) return 0.0;
        if (kappa1 < 0) return 1.0;
        return 0.5;  // flat-point convention
    }
    return 0.5 - std::atan((kappa1 + kappa2) / (kappa1 - kappa2)) / EIGEN_PI;
}

double curvedness(double kappa1, double kappa2) {
    return std::sqrt((kappa1 * kappa1 + kappa2 * kappa2) / 2.0);
}

double normal_orientation(const Vec3& unit_normal) {
    if (std::abs(unit_normal.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("normal_orientation requires a unit vector");
    return std::asin(std::min(1.0, std::abs(unit_normal.y())));
}

}  // namespace lvm
