#include "lvmorph/volume.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace lvm {

void validate_volume(const ScalarVolume& volume) {
    for (int a = 0; a < 3; ++a)
        if (volume.dims[a] < 2) throw std::invalid_argument("volume dims must be >= 2 per axis");
    if (!(volume.spacing.minCoeff() > 0)) throw std::invalid_argument("volume spacing must be positive");
    const std::size_t expect = static_cast<std::size_t>(volume.dims[0]) * volume.dims[1] * volume.dims[2];
    if (volume.values.size() != expect)
        throw std::invalid_argument("volume value count does not match dims");
}

ScalarVolume median_filter(const ScalarVolume& volume, const std::array<int, 3>& kernel) {
    validate_volume(volume);
    for (int a = 0; a < 3; ++a)
        if (kernel[a] < 1 || kernel[a] % 2 == 0)
            throw std::invalid_argument("median kernel dimensions must be odd and >= 1");

    ScalarVolume out = volume;
    const int rx = kernel[0] / 2, ry = kernel[1] / 2, rz = kernel[2] / 2;
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(kernel[0]) * kernel[1] * kernel[2]);
    for (int z = 0; z < volume.dims[2]; ++z) {
        for (int y = 0; y < volume.dims[1]; ++y) {
            for (int x = 0; x < volume.dims[0]; ++x) {
                window.clear();
                for (int dz = -rz; dz <= rz; ++dz) {
                    const int cz = std::clamp(z + dz, 0, volume.dims[2] - 1);
                    for (int dy = -ry; dy <= ry; ++dy) {
                        const int cy = std::clamp(y + dy, 0, volume.dims[1] - 1);
                        for (int dx = -rx; dx <= rx; ++dx)
                            window.push_back(volume.at(std::clamp(x + dx, 0, volume.dims[0] - 1), cy, cz));
                    }
                }
                auto mid = window.begin() + static_cast<std::ptrdiff_t>(window.size() / 2);
                std::nth_element(window.begin(), mid, window.end());
                out.at(x, y, z) = *mid;
            }
        }
    }
    return out;
}

ScalarVolume load_volume(const std::string& raw_path, const std::string& meta_path) {
    std::ifstream meta(meta_path);
    if (!meta) throw std::runtime_error(meta_path + ": cannot open");
    nlohmann::json j;
    try {
        meta >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(meta_path + ": invalid JSON: " + e.what());
    }

    ScalarVolume v;
    const auto dims = j.at("dims");
    for (int a = 0; a < 3; ++a) v.dims[a] = dims.at(a).get<int>();
    if (j.contains("spacing"))
        for (int a = 0; a < 3; ++a) v.spacing[a] = j["spacing"].at(a).get<double>();
    if (j.contains("origin"))
        for (int a = 0; a < 3; ++a) v.origin[a] = j["origin"].at(a).get<double>();
    const std::string dtype = j.value("dtype", "float32");

    const std::size_t count = static_cast<std::size_t>(v.dims[0]) * v.dims[1] * v.dims[2];
    std::ifstream raw(raw_path, std::ios::binary);
    if (!raw) throw std::runtime_error(raw_path + ": cannot open");
    v.values.resize(count);
    if (dtype == "float32") {
        std::vector<float> buf(count);
        raw.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(float)));
        if (!raw) throw std::runtime_error(raw_path + ": truncated float32 data");
        std::copy(buf.begin(), buf.end(), v.values.begin());
    } else if (dtype == "uint16") {
        std::vector<std::uint16_t> buf(count);
        raw.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * sizeof(std::uint16_t)));
        if (!raw) throw std::runtime_error(raw_path + ": truncated uint16 data");
        std::copy(buf.begin(), buf.end(), v.values.begin());
    } else {
        throw std::runtime_error(meta_path + ": unsupported dtype '" + dtype + "'");
    }
    validate_volume(v);
    return v;
}

void save_volume(const ScalarVolume& volume, const std::string& raw_path, const std::string& meta_path,
                 const std::string& dtype) {
    validate_volume(volume);
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) throw std::runtime_error(raw_path + ": cannot open for writing");
    if (dtype == "float32") {
        std::vector<float> buf(volume.values.begin(), volume.values.end());
        raw.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
    } else if (dtype == "uint16") {
        std::vector<std::uint16_t> buf(volume.values.size());
        for (std::size_t i = 0; i < buf.size(); ++i)
            buf[i] = static_cast<std::uint16_t>(std::clamp(volume.values[i], 0.0, 65535.0));
        raw.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size() * sizeof(std::uint16_t)));
    } else {
        throw std::runtime_error("unsupported dtype '" + dtype + "'");
    }
    if (!raw) throw std::runtime_error(raw_path + ": write failed");

    nlohmann::json j;
    j["dims"] = volume.dims;
    j["spacing"] = {volume.spacing.x(), volume.spacing.y(), volume.spacing.z()};
    j["origin"] = {volume.origin.x(), volume.origin.y(), volume.origin.z()};
    j["dtype"] = dtype;
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error(meta_path + ": cannot open for writing");
    meta << j.dump(2) << '\n';
}

}  // namespace lvm
