#include "lvmorph/phantom.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace lvm {

namespace {

// RNG -> double in [0,1), independent of std::uniform_real_distribution
// internals so phantom output is stable across standard libraries.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void validate_spec(const PhantomSpec& spec) {
    if (!(spec.radii.minCoeff() > 0)) throw std::invalid_argument("phantom radii must be positive");
    if (spec.bump_amplitude < 0) throw std::invalid_argument("bump amplitude must be >= 0");
    if (spec.bump_count > 0 && !(spec.bump_wavelength > 0))
        throw std::invalid_argument("bump wavelength must be positive");
    if (spec.resolution < 1) throw std::invalid_argument("phantom resolution must be >= 1");
    if (spec.bump_count < 0) throw std::invalid_argument("bump count must be >= 0");
}

Vec3 effective_radii(const PhantomSpec& spec) {
    return spec.base == PhantomBase::Sphere ? Vec3::Constant(spec.radii.x()) : spec.radii;
}

std::vector<Vec3> bump_centers(const PhantomSpec& spec) {
    std::mt19937_64 rng(spec.seed);
    const Vec3 radii = effective_radii(spec);
    std::vector<Vec3> centers;
    centers.reserve(static_cast<size_t>(spec.bump_count));
    for (int i = 0; i < spec.bump_count; ++i) {
        double z = 2.0 * unit_double(rng) - 1.0;
        const double phi = 2.0 * EIGEN_PI * unit_double(rng);
        if (spec.base == PhantomBase::HalfEllipsoidShell && z > 0) z = -z;  // apex-side half only
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const Vec3 dir(s * std::cos(phi), s * std::sin(phi), z);
        centers.push_back(radii.cwiseProduct(dir));
    }
    return centers;
}

double bump_field(const Vec3& surface_point, const std::vector<Vec3>& centers, const PhantomSpec& spec) {
    double d = spec.bump_offset;
    const double two_sigma_sq = 2.0 * spec.bump_wavelength * spec.bump_wavelength;
    for (const Vec3& c : centers)
        d += spec.bump_amplitude * std::exp(-(surface_point - c).squaredNorm() / two_sigma_sq);
    return d;
}

// Outward normal of the axis-aligned ellipsoid at a point on it.
Vec3 ellipsoid_normal(const Vec3& p, const Vec3& radii) {
    return Vec3(p.x() / (radii.x() * radii.x()), p.y() / (radii.y() * radii.y()),
                p.z() / (radii.z() * radii.z()))
        .normalized();
}

TriangleMesh half_ellipsoid_shell(const PhantomSpec& spec) {
    const Vec3 r = spec.radii;
    const int rows = 8 * spec.resolution;   // apex to rim
    const int cols = 16 * spec.resolution;  // around the axis
    std::vector<Vec3> verts;
    verts.emplace_back(0.0, 0.0, -r.z());  // apex pole
    for (int i = 1; i <= rows; ++i) {
        const double alpha = (static_cast<double>(i) / rows) * (EIGEN_PI / 2.0);
        for (int j = 0; j < cols; ++j) {
            const double theta = 2.0 * EIGEN_PI * j / cols;
            verts.emplace_back(r.x() * std::sin(alpha) * std::cos(theta),
                               r.y() * std::sin(alpha) * std::sin(theta), -r.z() * std::cos(alpha));
        }
    }
    std::vector<Eigen::Vector3i> tris;
    for (int j = 0; j < cols; ++j) tris.emplace_back(0, 1 + j, 1 + (j + 1) % cols);
    for (int i = 1; i < rows; ++i) {
        const int a = 1 + (i - 1) * cols, b = 1 + i * cols;
        for (int j = 0; j < cols; ++j) {
            const int jn = (j + 1) % cols;
            tris.emplace_back(a + j, b + j, b + jn);
            tris.emplace_back(a + j, b + jn, a + jn);
        }
    }
    Points V(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = verts[i];
    Faces F(static_cast<Eigen::Index>(tris.size()), 3);
    for (size_t i = 0; i < tris.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = tris[i];
    return make_mesh(std::move(V), std::move(F));
}

}  // namespace

TriangleMesh icosphere(int subdivisions, double radius) {
    if (subdivisions < 0) throw std::invalid_argument("subdivisions must be >= 0");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (auto& v : verts) v.normalize();
    std::vector<Eigen::Vector3i> tris = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1},
    };
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized());
            const int idx = static_cast<int>(verts.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Eigen::Vector3i> next;
        next.reserve(tris.size() * 4);
        for (const auto& tr : tris) {
            const int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
            next.push_back({tr[0], ab, ca});
            next.push_back({tr[1], bc, ab});
            next.push_back({tr[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    Points V(static_cast<Eigen::Index>(verts.size()), 3);
    for (size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = radius * verts[i];
    Faces F(static_cast<Eigen::Index>(tris.size()), 3);
    for (size_t i = 0; i < tris.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = tris[i];
    return make_mesh(std::move(V), std::move(F));
}

TriangleMesh generate_phantom(const PhantomSpec& spec) {
    validate_spec(spec);
    const Vec3 radii = effective_radii(spec);

    TriangleMesh base;
    if (spec.base == PhantomBase::HalfEllipsoidShell) {
        base = half_ellipsoid_shell(spec);
    } else {
        base = icosphere(spec.resolution, 1.0);
        base.vertices.col(0) *= radii.x();
        base.vertices.col(1) *= radii.y();
        base.vertices.col(2) *= radii.z();
    }

    const auto centers = bump_centers(spec);
    Points V = base.vertices;
    if (spec.bump_count > 0 || spec.bump_offset != 0.0) {
        for (Eigen::Index i = 0; i < V.rows(); ++i) {
            const Vec3 p = V.row(i);
            V.row(i) += (bump_field(p, centers, spec) * ellipsoid_normal(p, radii)).transpose();
        }
    }
    return make_mesh(std::move(V), base.faces);
}

ScalarVolume phantom_volume(const PhantomSpec& spec, const std::array<int, 3>& dims, double margin_mm) {
    validate_spec(spec);
    if (spec.base == PhantomBase::HalfEllipsoidShell)
        throw std::invalid_argument("phantom_volume supports closed bases only");
    const Vec3 radii = effective_radii(spec);
    const auto centers = bump_centers(spec);

    // Bumps rarely stack more than a few deep; 3x amplitude bounds the field
    // in practice without blowing up the grid extent for dense bump counts.
    const double pad = 3.0 * spec.bump_amplitude + spec.bump_offset + margin_mm;
    const Vec3 extent = radii + Vec3::Constant(pad);

    ScalarVolume vol;
    vol.dims = dims;
    vol.origin = -extent;
    for (int a = 0; a < 3; ++a) vol.spacing[a] = 2.0 * extent[a] / (dims[a] - 1);
    vol.values.resize(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2]);

    for (int z = 0; z < dims[2]; ++z) {
        for (int y = 0; y < dims[1]; ++y) {
            for (int x = 0; x < dims[0]; ++x) {
                const Vec3 p = vol.position(x, y, z);
                const Vec3 q = p.cwiseQuotient(radii);
                const double qn = q.norm();
                if (qn < 1e-12) {
                    vol.at(x, y, z) = -radii.minCoeff();
                    continue;
                }
                const Vec3 surface = radii.cwiseProduct(q / qn);
                const double radial_scale = surface.norm();
                vol.at(x, y, z) = (qn - 1.0) * radial_scale - bump_field(surface, centers, spec);
            }
        }
    }
    return vol;
}

PhantomSpec phantom_spec_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }

    PhantomSpec spec;
    const std::string base = j.value("base", "sphere");
    if (base == "sphere")
        spec.base = PhantomBase::Sphere;
    else if (base == "ellipsoid")
        spec.base = PhantomBase::Ellipsoid;
    else if (base == "half-ellipsoid-shell")
        spec.base = PhantomBase::HalfEllipsoidShell;
    else
        throw std::runtime_error(path + ": unknown base shape '" + base + "'");

    if (j.contains("radii")) {
        if (j["radii"].is_number()) {
            spec.radii = Vec3::Constant(j["radii"].get<double>());
        } else {
            for (int a = 0; a < 3; ++a) spec.radii[a] = j["radii"].at(a).get<double>();
        }
    }
    if (j.contains("bumps")) {
        const auto& b = j["bumps"];
        spec.bump_count = b.value("count", 0);
        spec.bump_amplitude = b.value("amplitude", 0.0);
        spec.bump_wavelength = b.value("wavelength", 1.0);
        spec.bump_offset = b.value("offset", 0.0);
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.resolution = j.value("resolution", 4);
    validate_spec(spec);
    return spec;
}

}  // namespace lvm
