#include "lvmorph/aha.hpp"
#include "lvmorph/mesh.hpp"
#include "lvmorph/phantom.hpp"

#include <doctest/doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

using namespace lvm;

namespace {

// Half-ellipsoid shell with apex at (0,0,-c) and rim in the z=0 plane,
// plus the landmark set the partition expects.
TriangleMesh lv_phantom(Landmarks& lm) {
    PhantomSpec spec;
    spec.base = PhantomBase::HalfEllipsoidShell;
    spec.radii = Vec3(1.5, 1.5, 2.5);
    spec.resolution = 3;
    lm.apex = Vec3(0, 0, -2.5);
    lm.base_centroid = Vec3(0, 0, 0);
    // Anchor angle chosen off the phantom's vertex grid so no vertex sits
    // exactly on a sector boundary.
    lm.septal = {Vec3(1.5 * std::cos(0.123), 1.5 * std::sin(0.123), 0),
                 Vec3(1.5 * std::cos(0.5), 1.5 * std::sin(0.5), -0.3),
                 Vec3(1.5 * std::cos(0.9), 1.5 * std::sin(0.9), -0.6)};
    return generate_phantom(spec);
}

}  // namespace

TEST_CASE("long axis from landmarks is the normalized apex-base direction") {
    Landmarks lm;
    lm.apex = Vec3(0, 0, 10);
    lm.base_centroid = Vec3(0, 0, 0);
    lm.septal = {Vec3(1, 0, 0), Vec3(1, 0.5, 0), Vec3(1, 1, 0)};
    TriangleMesh sphere = icosphere(2);
    LongAxis axis = compute_long_axis(sphere, lm);
    CHECK((axis.direction - Vec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("long axis from covariance aligns with the dominant ellipsoid axis") {
    PhantomSpec spec;
    spec.base = PhantomBase::Ellipsoid;
    spec.radii = Vec3(3, 1, 1);
    spec.resolution = 3;
    TriangleMesh ellipsoid = generate_phantom(spec);
    LongAxis axis = compute_long_axis(ellipsoid);
    CHECK(std::abs(std::abs(axis.direction.x()) - 1.0) < 1e-6);
    CHECK(axis.extent == doctest::Approx(6.0).epsilon(1e-6));
}

TEST_CASE("isotropic covariance without landmarks is ambiguous") {
    TriangleMesh sphere = icosphere(3);
    CHECK_THROWS(compute_long_axis(sphere));
}

TEST_CASE("territory map") {
    CHECK(territory_of(7) == Artery::LAD);
    CHECK(territory_of(10) == Artery::RCA);
    const std::set<int> lad{1, 2, 7, 8, 13, 14, 17};
    const std::set<int> rca{3, 4, 9, 10, 15};
    const std::set<int> lcx{5, 6, 11, 12, 16};
    for (int s = 1; s <= 17; ++s) {
        if (lad.count(s)) CHECK(territory_of(s) == Artery::LAD);
        if (rca.count(s)) CHECK(territory_of(s) == Artery::RCA);
        if (lcx.count(s)) CHECK(territory_of(s) == Artery::LCX);
    }
    CHECK_THROWS_AS(territory_of(0), std::invalid_argument);
    CHECK_THROWS_AS(territory_of(18), std::invalid_argument);
    CHECK(artery_name(Artery::LAD) == "LAD");
}

TEST_CASE("partition of an LV phantom produces all 17 segments") {
    Landmarks lm;
    TriangleMesh mesh = lv_phantom(lm);
    SegmentLabeling labeling = partition_17(mesh, lm);

    REQUIRE(labeling.segment_of_vertex.size() == static_cast<size_t>(mesh.vertex_count()));
    for (int s = 1; s <= 17; ++s) CHECK(!labeling.segment_vertices[s - 1].empty());

    // Every vertex in exactly one segment, and the lists tile the mesh.
    std::set<int> seen;
    for (int s = 0; s < 17; ++s)
        for (int v : labeling.segment_vertices[s]) {
            CHECK(labeling.segment_of_vertex[v] == s + 1);
            CHECK(seen.insert(v).second);
        }
    CHECK(seen.size() == static_cast<size_t>(mesh.vertex_count()));
}

TEST_CASE("the apex vertex lands in segment 17") {
    Landmarks lm;
    TriangleMesh mesh = lv_phantom(lm);
    SegmentLabeling labeling = partition_17(mesh, lm);
    int apex_vertex = 0;
    double best = 1e30;
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
        const double d = (mesh.vertices.row(i).transpose() - lm.apex).norm();
        if (d < best) best = d, apex_vertex = static_cast<int>(i);
    }
    CHECK(labeling.segment_of_vertex[apex_vertex] == 17);
}

TEST_CASE("longitudinal bands are monotone along the axis") {
    Landmarks lm;
    TriangleMesh mesh = lv_phantom(lm);
    SegmentLabeling labeling = partition_17(mesh, lm);
    auto band = [](int segment) {
        if (segment <= 6) return 0;   // basal
        if (segment <= 12) return 1;  // mid
        if (segment <= 16) return 2;  // apical
        return 3;                     // cap
    };
    // Axis points base -> apex, i.e. -z here: deeper bands have smaller z.
    double band_min[4] = {1e30, 1e30, 1e30, 1e30};
    double band_max[4] = {-1e30, -1e30, -1e30, -1e30};
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
        const int b = band(labeling.segment_of_vertex[i]);
        band_min[b] = std::min(band_min[b], mesh.vertices(i, 2));
        band_max[b] = std::max(band_max[b], mesh.vertices(i, 2));
    }
    for (int b = 0; b + 1 < 4; ++b) {
        CHECK(band_max[b] > band_max[b + 1]);
        CHECK(band_min[b] > band_min[b + 1]);
    }
}

TEST_CASE("labels are invariant under joint rigid transformation") {
    Landmarks lm;
    TriangleMesh mesh = lv_phantom(lm);
    SegmentLabeling before = partition_17(mesh, lm);

    Eigen::Matrix3d R = Eigen::AngleAxisd(1.1, Vec3(0.3, -0.5, 0.8).normalized()).toRotationMatrix();
    const Vec3 t(4, -2, 7);
    TriangleMesh moved = rigid_transform(mesh, R, t);
    Landmarks lm2;
    lm2.apex = R * lm.apex + t;
    lm2.base_centroid = R * lm.base_centroid + t;
    for (int i = 0; i < 3; ++i) lm2.septal[i] = R * lm.septal[i] + t;

    SegmentLabeling after = partition_17(moved, lm2);
    CHECK(before.segment_of_vertex == after.segment_of_vertex);
}

TEST_CASE("labeling CSV round trip") {
    Landmarks lm;
    TriangleMesh mesh = lv_phantom(lm);
    SegmentLabeling labeling = partition_17(mesh, lm);
    const std::string path =
        (std::filesystem::temp_directory_path() / "lvm_labels.csv").string();
    save_labeling_csv(labeling, path);
    SegmentLabeling back = load_labeling_csv(path);
    CHECK(back.segment_of_vertex == labeling.segment_of_vertex);
    for (int s = 0; s < 17; ++s) CHECK(back.segment_vertices[s] == labeling.segment_vertices[s]);
    std::remove(path.c_str());
}

TEST_CASE("landmarks JSON loader") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "lvm_landmarks.json").string();
    {
        std::ofstream out(path);
        out << R"({"apex":[0,0,-2.5],"base":[0,0,0],)"
            << R"("septal":[[1.5,0,0],[1.4,0.5,-0.3],[1.2,0.9,-0.6]]})";
    }
    Landmarks lm = landmarks_from_json(path);
    CHECK((lm.apex - Vec3(0, 0, -2.5)).norm() < 1e-12);
    CHECK((lm.septal[2] - Vec3(1.2, 0.9, -0.6)).norm() < 1e-12);
    std::remove(path.c_str());
}
