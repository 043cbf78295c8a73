#include "lvmorph/marching_cubes.hpp"
#include "lvmorph/mesh.hpp"
#include "lvmorph/phantom.hpp"
#include "lvmorph/smoothing.hpp"
#include "lvmorph/volume.hpp"

#include <doctest/doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <vector>

using namespace lvm;

namespace {

ScalarVolume make_volume(std::array<int, 3> dims, double value = 0.0) {
    ScalarVolume vol;
    vol.dims = dims;
    vol.values.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], value);
    return vol;
}

// Brute-force median over a clamped window, the oracle for median_filter.
double window_median(const ScalarVolume& vol, int cx, int cy, int cz, const std::array<int, 3>& k) {
    std::vector<double> window;
    for (int dz = -k[2] / 2; dz <= k[2] / 2; ++dz)
        for (int dy = -k[1] / 2; dy <= k[1] / 2; ++dy)
            for (int dx = -k[0] / 2; dx <= k[0] / 2; ++dx) {
                const int x = std::clamp(cx + dx, 0, vol.dims[0] - 1);
                const int y = std::clamp(cy + dy, 0, vol.dims[1] - 1);
                const int z = std::clamp(cz + dz, 0, vol.dims[2] - 1);
                window.push_back(vol.at(x, y, z));
            }
    std::sort(window.begin(), window.end());
    return window[window.size() / 2];
}

}  // namespace

TEST_CASE("volume validation") {
    ScalarVolume vol = make_volume({2, 2, 2});
    CHECK_NOTHROW(validate_volume(vol));
    vol.dims = {1, 2, 2};
    CHECK_THROWS_AS(validate_volume(vol), std::invalid_argument);
    vol.dims = {2, 2, 2};
    vol.spacing = Eigen::Vector3d(1, 0, 1);
    CHECK_THROWS_AS(validate_volume(vol), std::invalid_argument);
    vol.spacing = Eigen::Vector3d(1, 1, 1);
    vol.values.pop_back();
    CHECK_THROWS_AS(validate_volume(vol), std::invalid_argument);
}

TEST_CASE("median filter on a constant volume is the identity") {
    ScalarVolume vol = make_volume({6, 5, 4}, 3.25);
    ScalarVolume out = median_filter(vol, {7, 7, 1});
    CHECK(out.values == vol.values);
}

TEST_CASE("median filter removes an isolated impulse") {
    ScalarVolume vol = make_volume({7, 7, 2});
    vol.at(3, 3, 0) = 100.0;
    ScalarVolume out = median_filter(vol, {3, 3, 1});
    CHECK(out.at(3, 3, 0) == 0.0);
}

TEST_CASE("median filter leaves ramp interiors unchanged") {
    ScalarVolume vol = make_volume({5, 5, 2});
    for (int z = 0; z < 2; ++z)
        for (int y = 0; y < 5; ++y)
            for (int x = 0; x < 5; ++x) vol.at(x, y, z) = x + 10.0 * y;
    ScalarVolume out = median_filter(vol, {3, 3, 1});
    for (int y = 1; y < 4; ++y)
        for (int x = 1; x < 4; ++x) CHECK(out.at(x, y, 0) == vol.at(x, y, 0));
}

TEST_CASE("median filter matches the brute-force oracle on random data") {
    ScalarVolume vol = make_volume({9, 8, 5});
    std::mt19937_64 rng(5);
    for (auto& v : vol.values) v = static_cast<double>(rng() % 1000);
    const std::array<int, 3> kernel{3, 5, 3};
    ScalarVolume out = median_filter(vol, kernel);
    for (int z = 0; z < vol.dims[2]; ++z)
        for (int y = 0; y < vol.dims[1]; ++y)
            for (int x = 0; x < vol.dims[0]; ++x)
                REQUIRE(out.at(x, y, z) == window_median(vol, x, y, z, kernel));
    // Output stays within the input range.
    const auto [lo, hi] = std::minmax_element(vol.values.begin(), vol.values.end());
    for (double v : out.values) {
        CHECK(v >= *lo);
        CHECK(v <= *hi);
    }
}

TEST_CASE("even kernel dimensions are rejected") {
    ScalarVolume vol = make_volume({4, 4, 4});
    CHECK_THROWS_AS(median_filter(vol, {2, 3, 3}), std::invalid_argument);
}

TEST_CASE("volume raw round trip") {
    namespace fs = std::filesystem;
    const std::string raw = (fs::temp_directory_path() / "lvm_vol.raw").string();
    const std::string meta = (fs::temp_directory_path() / "lvm_vol.json").string();
    ScalarVolume vol = make_volume({4, 3, 2});
    vol.spacing = Eigen::Vector3d(0.5, 1, 2);
    vol.origin = Eigen::Vector3d(-1, 0, 3);
    for (std::size_t i = 0; i < vol.values.size(); ++i) vol.values[i] = static_cast<double>(i);

    for (const char* dtype : {"float32", "uint16"}) {
        save_volume(vol, raw, meta, dtype);
        ScalarVolume back = load_volume(raw, meta);
        CHECK(back.dims == vol.dims);
        CHECK((back.spacing - vol.spacing).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((back.origin - vol.origin).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE(back.values.size() == vol.values.size());
        for (std::size_t i = 0; i < vol.values.size(); ++i)
            CHECK(back.values[i] == doctest::Approx(vol.values[i]).epsilon(1e-6));
    }
    std::remove(raw.c_str());
    std::remove(meta.c_str());
}

TEST_CASE("marching cubes on a sphere signed-distance field") {
    ScalarVolume vol;
    vol.dims = {64, 64, 64};
    vol.spacing = Eigen::Vector3d(0.5, 0.5, 0.5);
    vol.origin = Eigen::Vector3d(-15.75, -15.75, -15.75);  // grid centered on 0
    vol.values.resize(64 * 64 * 64);
    const double r = 10.0;
    for (int z = 0; z < 64; ++z)
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) vol.at(x, y, z) = vol.position(x, y, z).norm() - r;

    TriangleMesh mesh = extract_isosurface(vol, 0.0);
    REQUIRE(mesh.vertex_count() > 0);
    const double tol = 0.5 * std::sqrt(3.0) / 2.0;
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i)
        REQUIRE(std::abs(mesh.vertices.row(i).norm() - r) < tol);

    MeshReport report = mesh_report(mesh);
    CHECK(report.euler_characteristic == 2);
    CHECK(report.boundary_edge_count == 0);
    // Outward orientation: positive enclosed volume near the analytic one.
    const double v = signed_volume(mesh.vertices, mesh.faces);
    CHECK(v == doctest::Approx(4.0 / 3.0 * EIGEN_PI * r * r * r).epsilon(0.02));
}

TEST_CASE("iso value without a crossing yields an empty mesh") {
    ScalarVolume vol = make_volume({4, 4, 4}, 1.0);
    TriangleMesh mesh = extract_isosurface(vol, 0.0);
    CHECK(mesh.vertex_count() == 0);
    CHECK(mesh.face_count() == 0);
}

TEST_CASE("smoothing identity cases") {
    TriangleMesh sphere = icosphere(2);
    SUBCASE("zero iterations returns the input exactly") {
        TriangleMesh out = smooth_mesh(sphere, 0, 0);
        CHECK((out.vertices.array() == sphere.vertices.array()).all());
    }
    SUBCASE("a planar patch is a fixed point") {
        Points V(4, 3);
        V << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
        Faces F(2, 3);
        F << 0, 1, 2, 0, 2, 3;
        TriangleMesh plane = make_mesh(V, F);
        TriangleMesh out = smooth_mesh(plane, 5, 5);
        CHECK((out.vertices - plane.vertices).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("negative iterations rejected") {
        CHECK_THROWS_AS(smooth_mesh(sphere, -1, 0), std::invalid_argument);
    }
}

TEST_CASE("smoothing reduces normal noise on a perturbed icosphere") {
    TriangleMesh sphere = icosphere(3);
    std::mt19937_64 rng(11);
    Points V = sphere.vertices;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        const double noise = 0.02 * (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5) * 2.0;
        V.row(i) *= 1.0 + noise;
    }
    TriangleMesh noisy = make_mesh(V, sphere.faces);

    auto mean_normal_deviation = [](const TriangleMesh& m) {
        double total = 0;
        for (Eigen::Index f = 0; f < m.face_count(); ++f) {
            const Vec3 c = (m.vertices.row(m.faces(f, 0)) + m.vertices.row(m.faces(f, 1)) +
                            m.vertices.row(m.faces(f, 2))) /
                           3.0;
            const Vec3 analytic = c.normalized();
            total += std::acos(std::clamp(face_normal(m.vertices, m.faces, f).dot(analytic), -1.0, 1.0));
        }
        return total / static_cast<double>(m.face_count());
    };

    TriangleMesh smoothed = smooth_mesh(noisy, 10, 10);
    CHECK(smoothed.vertex_count() == noisy.vertex_count());
    CHECK(smoothed.face_count() == noisy.face_count());
    CHECK((smoothed.faces.array() == noisy.faces.array()).all());
    CHECK(mean_normal_deviation(smoothed) < mean_normal_deviation(noisy));
}

TEST_CASE("phantom volume meshes back to the phantom surface") {
    PhantomSpec spec;
    spec.base = PhantomBase::Sphere;
    spec.radii = Vec3(3, 3, 3);
    TriangleMesh mesh = extract_isosurface(phantom_volume(spec, {40, 40, 40}), 0.0);
    REQUIRE(mesh.vertex_count() > 0);
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i)
        REQUIRE(mesh.vertices.row(i).norm() == doctest::Approx(3.0).epsilon(0.05));
    CHECK(mesh_report(mesh).euler_characteristic == 2);
}
