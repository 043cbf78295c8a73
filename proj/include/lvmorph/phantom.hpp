#pragma once

#include "lvmorph/mesh.hpp"
#include "lvmorph/volume.hpp"

#include <cstdint>
#include <string>

namespace lvm {

enum class PhantomBase { Sphere, Ellipsoid, HalfEllipsoidShell };

/// Synthetic test surface: a base shape whose vertices are displaced along
/// their normals by a seeded sum-of-Gaussian-bumps field standing in for
/// trabeculation. Deterministic for a fixed spec + seed.
struct PhantomSpec {
    PhantomBase base = PhantomBase::Sphere;
    Vec3 radii{1.0, 1.0, 1.0};      // mm; sphere uses radii.x()
    int bump_count = 0;
    double bump_amplitude = 0.0;    // mm, displacement along the normal
    double bump_wavelength = 1.0;   // mm, Gaussian sigma on the base surface
    double bump_offset = 0.0;       // mm, uniform outward shift of the whole field
    std::uint64_t seed = 0;
    int resolution = 4;             // icosphere subdivisions / grid density
};

PhantomSpec phantom_spec_from_json(const std::string& path);

/// Closed icosphere; `subdivisions` quadruples the face count each level.
TriangleMesh icosphere(int subdivisions, double radius = 1.0);

TriangleMesh generate_phantom(const PhantomSpec& spec);

/// The same phantom as an implicit scalar field (negative inside) sampled
/// on a regular grid, for exercising the volume -> mesh path. Supports the
/// closed bases (sphere, ellipsoid).
ScalarVolume phantom_volume(const PhantomSpec& spec, const std::array<int, 3>& dims, double margin_mm = 2.0);

}  // namespace lvm
