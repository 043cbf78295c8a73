#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace lvm {

/// Regular scalar grid. Values are stored x-fastest: index = x + nx*(y + ny*z).
struct ScalarVolume {
    std::array<int, 3> dims{0, 0, 0};             // voxels per axis
    Eigen::Vector3d spacing{1.0, 1.0, 1.0};       // mm per voxel
    Eigen::Vector3d origin{0.0, 0.0, 0.0};        // mm position of voxel (0,0,0)
    std::vector<double> values;

    std::size_t index(int x, int y, int z) const {
        return static_cast<std::size_t>(x) +
               static_cast<std::size_t>(dims[0]) *
                   (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims[1]) * static_cast<std::size_t>(z));
    }
    double at(int x, int y, int z) const { return values[index(x, y, z)]; }
    double& at(int x, int y, int z) { return values[index(x, y, z)]; }

    Eigen::Vector3d position(int x, int y, int z) const {
        return origin + Eigen::Vector3d(x * spacing.x(), y * spacing.y(), z * spacing.z());
    }
};

/// Throws std::invalid_argument when the volume violates its invariants
/// (dims >= 2 per axis, positive spacing, matching value count).
void validate_volume(const ScalarVolume& volume);

/// Median filter with per-axis odd window sizes; borders clamp to the
/// volume. (7,7,1) reproduces a 7x7 filter applied slice by slice.
ScalarVolume median_filter(const ScalarVolume& volume, const std::array<int, 3>& kernel);

/// Raw little-endian data file (float32 or uint16) plus a JSON sidecar
/// {"dims":[...],"spacing":[...],"origin":[...],"dtype":"float32"|"uint16"}.
ScalarVolume load_volume(const std::string& raw_path, const std::string& meta_path);
void save_volume(const ScalarVolume& volume, const std::string& raw_path, const std::string& meta_path,
                 const std::string& dtype = "float32");

}  // namespace lvm
