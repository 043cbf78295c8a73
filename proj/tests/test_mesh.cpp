#include "lvmorph/mesh.hpp"
#include "lvmorph/mesh_io.hpp"
#include "lvmorph/phantom.hpp"

#include <doctest/doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

using namespace lvm;

namespace {

std::string temp_file(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

TriangleMesh tetrahedron() {
    Points V(4, 3);
    V << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    Faces F(4, 3);
    F << 0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2;
    return make_mesh(V, F);
}

}  // namespace

TEST_CASE("tetrahedron OFF round trip and report") {
    const std::string path = temp_file("lvm_tetra.off");
    {
        std::ofstream out(path);
        out << "OFF\n4 4 0\n"
               "1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n"
               "3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";
    }
    TriangleMesh mesh = load_mesh(path);
    CHECK(mesh.vertex_count() == 4);
    CHECK(mesh.face_count() == 4);
    MeshReport report = mesh_report(mesh);
    CHECK(report.euler_characteristic == 2);
    CHECK(report.edge_count == 6);
    CHECK(report.boundary_edge_count == 0);
    CHECK(report.nonmanifold_edge_count == 0);
    std::remove(path.c_str());
}

TEST_CASE("face index out of range is rejected") {
    const std::string path = temp_file("lvm_bad.off");
    {
        std::ofstream out(path);
        out << "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 3\n";
    }
    CHECK_THROWS_AS(load_mesh(path), std::invalid_argument);
    std::remove(path.c_str());
}

TEST_CASE("degenerate faces are rejected") {
    Points V(3, 3);
    V << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    Faces F(1, 3);
    F << 0, 1, 1;  // repeated index
    CHECK_THROWS_AS(validate_mesh(V, F), std::invalid_argument);

    Points Vz(3, 3);
    Vz << 0, 0, 0, 1, 0, 0, 2, 0, 0;  // colinear -> zero area
    Faces Fz(1, 3);
    Fz << 0, 1, 2;
    CHECK_THROWS_AS(validate_mesh(Vz, Fz), std::invalid_argument);
}

TEST_CASE("icosphere is closed with the expected vertex count") {
    TriangleMesh sphere = icosphere(4);
    CHECK(sphere.vertex_count() == 2562);
    MeshReport report = mesh_report(sphere);
    CHECK(report.boundary_edge_count == 0);
    CHECK(report.euler_characteristic == 2);
    CHECK(is_closed(sphere));
    // Unit normals.
    for (Eigen::Index i = 0; i < sphere.vertex_count(); ++i)
        CHECK(std::abs(sphere.normals.row(i).norm() - 1.0) < 1e-9);
}

TEST_CASE("mesh formats round trip") {
    TriangleMesh mesh = icosphere(2, 1.3);
    for (const char* name : {"lvm_rt.off", "lvm_rt.ply", "lvm_rt.obj"}) {
        const std::string path = temp_file(name);
        save_mesh(mesh, path);
        TriangleMesh back = load_mesh(path);
        REQUIRE(back.vertex_count() == mesh.vertex_count());
        REQUIRE(back.face_count() == mesh.face_count());
        CHECK((back.vertices - mesh.vertices).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((back.faces - mesh.faces).cwiseAbs().maxCoeff() == 0);
        std::remove(path.c_str());
    }
}

TEST_CASE("binary PLY is rejected") {
    const std::string path = temp_file("lvm_bin.ply");
    {
        std::ofstream out(path, std::ios::binary);
        out << "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n";
    }
    CHECK_THROWS(load_mesh(path));
    std::remove(path.c_str());
}

TEST_CASE("make_mesh fixes inward winding of closed meshes") {
    TriangleMesh t = tetrahedron();
    Faces flipped = t.faces;
    flipped.col(1).swap(flipped.col(2));
    TriangleMesh fixed = make_mesh(t.vertices, flipped);
    CHECK(signed_volume(fixed.vertices, fixed.faces) > 0);
}

TEST_CASE("phantom sphere with zero bumps has exact radius") {
    PhantomSpec spec;
    spec.base = PhantomBase::Sphere;
    spec.radii = Vec3(1, 1, 1);
    spec.resolution = 3;
    TriangleMesh mesh = generate_phantom(spec);
    for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i)
        CHECK(std::abs(mesh.vertices.row(i).norm() - 1.0) < 1e-9);
    CHECK(mesh_report(mesh).euler_characteristic == 2);
}

TEST_CASE("phantom generation is deterministic") {
    PhantomSpec spec;
    spec.base = PhantomBase::Ellipsoid;
    spec.radii = Vec3(2, 1.5, 1);
    spec.bump_count = 30;
    spec.bump_amplitude = 0.1;
    spec.bump_wavelength = 0.4;
    spec.seed = 77;
    spec.resolution = 3;
    TriangleMesh a = generate_phantom(spec);
    TriangleMesh b = generate_phantom(spec);
    CHECK((a.vertices.array() == b.vertices.array()).all());
    CHECK((a.faces.array() == b.faces.array()).all());
    CHECK(mesh_report(a).euler_characteristic == 2);
}

TEST_CASE("half-ellipsoid shell phantom is open with the apex at -z") {
    PhantomSpec spec;
    spec.base = PhantomBase::HalfEllipsoidShell;
    spec.radii = Vec3(1.5, 1.5, 2.5);
    spec.resolution = 2;
    TriangleMesh mesh = generate_phantom(spec);
    MeshReport report = mesh_report(mesh);
    CHECK(report.boundary_edge_count > 0);
    CHECK(std::abs(mesh.vertices.col(2).minCoeff() + 2.5) < 1e-9);
}

TEST_CASE("rigid_transform basics") {
    TriangleMesh mesh = tetrahedron();

    SUBCASE("identity returns the mesh unchanged") {
        TriangleMesh out = rigid_transform(mesh, Eigen::Matrix3d::Identity(), Vec3::Zero());
        CHECK((out.vertices - mesh.vertices).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("90 degree rotation about z maps x to y") {
        Points V(3, 3);
        V << 1, 0, 0, 0, 0, 0, 0, 0, 1;
        Faces F(1, 3);
        F << 0, 1, 2;
        TriangleMesh m = make_mesh(V, F);
        Eigen::Matrix3d R;
        R << 0, -1, 0, 1, 0, 0, 0, 0, 1;
        TriangleMesh out = rigid_transform(m, R, Vec3::Zero());
        CHECK((out.vertices.row(0) - Eigen::RowVector3d(0, 1, 0)).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("edge lengths scale exactly with the scale factor") {
        Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
        const double s = 2.5;
        TriangleMesh out = rigid_transform(mesh, R, Vec3(4, -1, 2), s);
        for (Eigen::Index f = 0; f < mesh.face_count(); ++f) {
            for (int e = 0; e < 3; ++e) {
                const int a = mesh.faces(f, e), b = mesh.faces(f, (e + 1) % 3);
                const double l0 = (mesh.vertices.row(a) - mesh.vertices.row(b)).norm();
                const double l1 = (out.vertices.row(a) - out.vertices.row(b)).norm();
                CHECK(std::abs(l1 / l0 - s) < 1e-9 * s);
            }
        }
    }

    SUBCASE("non-orthonormal rotation is rejected") {
        Eigen::Matrix3d notR = Eigen::Matrix3d::Identity();
        notR(0, 0) = 1.5;
        CHECK_THROWS_AS(rigid_transform(mesh, notR, Vec3::Zero()), std::invalid_argument);
        CHECK_THROWS_AS(rigid_transform(mesh, Eigen::Matrix3d::Identity(), Vec3::Zero(), -1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("signed volume of the unit icosphere approximates 4/3 pi") {
    TriangleMesh sphere = icosphere(4);
    const double v = signed_volume(sphere.vertices, sphere.faces);
    CHECK(v == doctest::Approx(4.0 / 3.0 * EIGEN_PI).epsilon(0.01));
}
