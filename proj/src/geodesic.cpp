#include "lvmorph/geodesic.hpp"

#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace lvm {

std::vector<double> geodesic_distances(const TriangleMesh& mesh, int source_vertex,
                                       const std::vector<int>& target_vertices) {
    const Eigen::Index nv = mesh.vertex_count();
    if (source_vertex < 0 || source_vertex >= nv)
        throw std::invalid_argument("geodesic source vertex out of range");
    for (int t : target_vertices)
        if (t < 0 || t >= nv) throw std::invalid_argument("geodesic target vertex out of range");

    // Weighted adjacency (edge = Euclidean length).
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<size_t>(nv));
    for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
        for (int e = 0; e < 3; ++e) {
            const int a = mesh.faces(f, e), b = mesh.faces(f, (e + 1) % 3);
            const double len = (mesh.vertices.row(a) - mesh.vertices.row(b)).norm();
            adj[static_cast<size_t>(a)].emplace_back(b, len);
            adj[static_cast<size_t>(b)].emplace_back(a, len);
        }
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(nv), kInf);
    std::vector<char> is_target(static_cast<size_t>(nv), 0);
    size_t remaining = 0;
    for (int t : target_vertices) {
        if (!is_target[static_cast<size_t>(t)]) ++remaining;
        is_target[static_cast<size_t>(t)] = 1;
    }

    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[static_cast<size_t>(source_vertex)] = 0.0;
    heap.emplace(0.0, source_vertex);
    while (!heap.empty() && remaining > 0) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[static_cast<size_t>(v)]) continue;
        if (is_target[static_cast<size_t>(v)]) {
            is_target[static_cast<size_t>(v)] = 0;
            --remaining;
        }
        for (const auto& [w, len] : adj[static_cast<size_t>(v)]) {
            const double nd = d + len;
            if (nd < dist[static_cast<size_t>(w)]) {
                dist[static_cast<size_t>(w)] = nd;
                heap.emplace(nd, w);
            }
        }
    }

    std::vector<double> out;
    out.reserve(target_vertices.size());
    for (int t : target_vertices) {
        const double d = dist[static_cast<size_t>(t)];
        if (d == kInf)
            throw std::runtime_error("vertices " + std::to_string(source_vertex) + " and " +
                                     std::to_string(t) + " are in different connected components");
        out.push_back(d);
    }
    return out;
}

}  // namespace lvm
