#include "lvmorph/marching_cubes.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "marching_cubes_tables.inc"

namespace lvm {

namespace {

// Cube corner offsets, matching the edge/tri table conventions.
constexpr int kCorner[8][3] = {
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1},
};

// Edge -> (corner a, corner b)
constexpr int kEdgeCorner[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
    {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

std::uint64_t grid_edge_key(int x, int y, int z, int ca, int cb, const std::array<int, 3>& dims) {
    int ax = x + kCorner[ca][0], ay = y + kCorner[ca][1], az = z + kCorner[ca][2];
    int bx = x + kCorner[cb][0], by = y + kCorner[cb][1], bz = z + kCorner[cb][2];
    if (std::tie(az, ay, ax) > std::tie(bz, by, bx)) {
        std::swap(ax, bx);
        std::swap(ay, by);
        std::swap(az, bz);
    }
    const int axis = (bx != ax) ? 0 : (by != ay) ? 1 : 2;
    const std::uint64_t lin = static_cast<std::uint64_t>(ax) +
                              static_cast<std::uint64_t>(dims[0]) *
                                  (static_cast<std::uint64_t>(ay) +
                                   static_cast<std::uint64_t>(dims[1]) * static_cast<std::uint64_t>(az));
    return lin * 3 + static_cast<std::uint64_t>(axis);
}

}  // namespace

TriangleMesh extract_isosurface(const ScalarVolume& volume, double iso_value) {
    validate_volume(volume);

    const auto [vmin, vmax] = std::minmax_element(volume.values.begin(), volume.values.end());
    if (iso_value < *vmin || iso_value > *vmax) return TriangleMesh{};

    std::vector<Vec3> verts;
    std::vector<Eigen::Vector3i> tris;
    std::unordered_map<std::uint64_t, int> edge_vertex;

    double corner_val[8];
    Vec3 corner_pos[8];
    int edge_idx[12];

    for (int z = 0; z + 1 < volume.dims[2]; ++z) {
        for (int y = 0; y + 1 < volume.dims[1]; ++y) {
            for (int x = 0; x + 1 < volume.dims[0]; ++x) {
                int cube = 0;
                for (int c = 0; c < 8; ++c) {
                    const int cx = x + kCorner[c][0], cy = y + kCorner[c][1], cz = z + kCorner[c][2];
                    corner_val[c] = volume.at(cx, cy, cz);
                    corner_pos[c] = volume.position(cx, cy, cz);
                    if (corner_val[c] < iso_value) cube |= 1 << c;
                }
                const int edges = kEdgeTable[cube];
                if (edges == 0) continue;

                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const auto key = grid_edge_key(x, y, z, kEdgeCorner[e][0], kEdgeCorner[e][1], volume.dims);
                    auto it = edge_vertex.find(key);
                    if (it == edge_vertex.end()) {
                        const int a = kEdgeCorner[e][0], b = kEdgeCorner[e][1];
                        const double denom = corner_val[b] - corner_val[a];
                        double t = denom == 0.0 ? 0.5 : (iso_value - corner_val[a]) / denom;
                        t = std::clamp(t, 0.0, 1.0);
                        verts.push_back(corner_pos[a] + t * (corner_pos[b] - corner_pos[a]));
                        it = edge_vertex.emplace(key, static_cast<int>(verts.size()) - 1).first;
                    }
                    edge_idx[e] = it->second;
                }

                for (int n = 0; kTriTable[cube][n] != -1; n += 3) {
                    const Eigen::Vector3i tri(edge_idx[kTriTable[cube][n]], edge_idx[kTriTable[cube][n + 1]],
                                              edge_idx[kTriTable[cube][n + 2]]);
                    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
                    tris.push_back(tri);
                }
            }
        }
    }

    Points V(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = verts[i];

    // Interpolated points can coincide when the iso value passes exactly
    // through a corner; drop the resulting zero-area triangles.
    std::vector<Eigen::Vector3i> kept;
    kept.reserve(tris.size());
    {
        Faces F1(1, 3);
        Points Vv = V;
        for (const auto& t : tris) {
            F1.row(0) = t;
            if (face_area(Vv, F1, 0) > kDegenerateAreaTol) kept.push_back(t);
        }
    }
    Faces F(static_cast<Eigen::Index>(kept.size()), 3);
    for (size_t i = 0; i < kept.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = kept[i];

    if (F.rows() == 0) return TriangleMesh{};
    return make_mesh(std::move(V), std::move(F));
}

}  // namespace lvm
