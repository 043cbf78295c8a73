#include "lvmorph/d2.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace lvm {

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

D2Histogram d2_descriptor(const Points& vertices, int n_pairs, int bins, std::uint64_t seed) {
    const Eigen::Index nv = vertices.rows();
    if (nv < 2) throw std::invalid_argument("d2_descriptor needs at least two vertices");
    if (n_pairs < 1 || bins < 1) throw std::invalid_argument("n_pairs and bins must be >= 1");

    std::mt19937_64 rng(seed);
    auto pick = [&]() {
        return std::min<Eigen::Index>(nv - 1, static_cast<Eigen::Index>(unit_double(rng) * static_cast<double>(nv)));
    };

    std::vector<double> distances;
    distances.reserve(static_cast<size_t>(n_pairs));
    double sum = 0.0;
    for (int k = 0; k < n_pairs; ++k) {
        Eigen::Index i = pick(), j = pick();
        while (j == i) j = pick();
        const double d = (vertices.row(i) - vertices.row(j)).norm();
        distances.push_back(d);
        sum += d;
    }
    const double mean = sum / static_cast<double>(n_pairs);
    if (!(mean > 0)) throw std::invalid_argument("d2_descriptor: all sampled distances are zero");

    D2Histogram out;
    out.mean_distance = mean;
    out.frequencies.assign(static_cast<size_t>(bins), 0.0);
    for (double d : distances) {
        const double x = d / mean;  // support [0, 3]
        const int bin = std::clamp(static_cast<int>(x / 3.0 * bins), 0, bins - 1);
        out.frequencies[static_cast<size_t>(bin)] += 1.0;
    }
    for (double& f : out.frequencies) f /= static_cast<double>(n_pairs);
    return out;
}

D2Histogram d2_descriptor(const TriangleMesh& mesh, int n_pairs, int bins, std::uint64_t seed) {
    return d2_descriptor(mesh.vertices, n_pairs, bins, seed);
}

}  // namespace lvm
