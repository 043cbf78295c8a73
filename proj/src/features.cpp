#include "lvmorph/features.hpp"

#include "lvmorph/geodesic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lvm {

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Eigen::Matrix<double, kFeatureDim, 1> FeatureVector::as_vector() const {
    Eigen::Matrix<double, kFeatureDim, 1> v;
    v[0] = shape_index;
    v[1] = curvedness;
    v[2] = normal_orientation;
    for (int i = 0; i < kGcdBins; ++i) v[3 + i] = gcd[static_cast<size_t>(i)];
    return v;
}

std::array<double, kGcdBins> gcd_histogram(const std::vector<double>& distances, double norm_max) {
    if (distances.empty()) throw std::invalid_argument("gcd_histogram: no distances");
    if (norm_max < 0) norm_max = *std::max_element(distances.begin(), distances.end());
    if (!(norm_max > 0)) throw std::invalid_argument("gcd_histogram: degenerate (all-zero) distances");

    std::array<double, kGcdBins> hist{};
    for (double d : distances) {
        int bin = static_cast<int>(d / norm_max * kGcdBins);
        bin = std::clamp(bin, 0, kGcdBins - 1);  // right-closed last bin
        hist[static_cast<size_t>(bin)] += 1.0;
    }
    for (double& h : hist) h /= static_cast<double>(distances.size());
    return hist;
}

SampleSet sample_points(const SegmentLabeling& labeling, int segment_id, int n, std::uint64_t seed) {
    if (segment_id < 1 || segment_id > 17) throw std::invalid_argument("segment id must be in 1..17");
    const auto& pool = labeling.segment_vertices[static_cast<size_t>(segment_id - 1)];
    if (pool.empty()) throw std::invalid_argument("segment " + std::to_string(segment_id) + " is empty");
    if (n < 1) throw std::invalid_argument("sample count must be >= 1");

    SampleSet out;
    out.segment_id = segment_id;
    out.seed = seed;
    if (static_cast<size_t>(n) >= pool.size()) {
        out.vertex_ids = pool;
        return out;
    }

    // Partial Fisher-Yates; the RNG-to-index map avoids distribution
    // differences between standard libraries.
    std::vector<int> shuffled = pool;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        const size_t remaining = shuffled.size() - static_cast<size_t>(i);
        const size_t j = static_cast<size_t>(i) +
                         std::min(remaining - 1, static_cast<size_t>(unit_double(rng) * static_cast<double>(remaining)));
        std::swap(shuffled[static_cast<size_t>(i)], shuffled[j]);
    }
    out.vertex_ids.assign(shuffled.begin(), shuffled.begin() + n);
    return out;
}

SegmentFeatures feature_vectors(const TriangleMesh& mesh, const CurvatureField& curvature,
                                const SegmentLabeling& labeling, int segment_id,
                                const FeatureParams& params) {
    const SampleSet samples = sample_points(labeling, segment_id, params.samples_per_segment, params.seed);
    const auto& ids = samples.vertex_ids;
    const size_t m = ids.size();
    if (m < 2) throw std::invalid_argument("segment needs >= 2 sampled points for the GCD");

    Eigen::MatrixXd dist(m, m);
    for (size_t i = 0; i < m; ++i) {
        const auto row = geodesic_distances(mesh, ids[i], ids);
        for (size_t j = 0; j < m; ++j) dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    const double norm_max = dist.maxCoeff();
    if (!(norm_max > 0)) throw std::runtime_error("all sampled geodesic distances are zero");

    SegmentFeatures out;
    out.vectors.reserve(m);
    std::vector<double> others;
    others.reserve(m - 1);
    for (size_t i = 0; i < m; ++i) {
        const int v = ids[i];
        if (!curvature.valid[static_cast<size_t>(v)]) {
            ++out.skipped_invalid_curvature;
            continue;
        }
        others.clear();
        for (size_t j = 0; j < m; ++j)
            if (j != i) others.push_back(dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));

        FeatureVector fv;
        fv.segment_id = segment_id;
        fv.vertex_id = v;
        fv.shape_index = shape_index(curvature.kappa1[v], curvature.kappa2[v]);
        fv.curvedness = curvedness(curvature.kappa1[v], curvature.kappa2[v]);
        fv.normal_orientation = normal_orientation(mesh.normals.row(v));
        fv.gcd = gcd_histogram(others, norm_max);
        out.vectors.push_back(fv);
    }
    return out;
}

Eigen::VectorXd shape_index_histogram(const TriangleMesh& mesh, const CurvatureField& curvature,
                                      const SegmentLabeling& labeling, int bins) {
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(17 * bins);
    for (int s = 1; s <= 17; ++s) {
        const auto& pool = labeling.segment_vertices[static_cast<size_t>(s - 1)];
        int count = 0;
        for (int v : pool) {
            if (!curvature.valid[static_cast<size_t>(v)]) continue;
            const double ip = shape_index(curvature.kappa1[v], curvature.kappa2[v]);
            int bin = std::clamp(static_cast<int>(ip * bins), 0, bins - 1);
            out[(s - 1) * bins + bin] += 1.0;
            ++count;
        }
        if (count == 0)
            throw std::runtime_error("segment " + std::to_string(s) + " has no valid-curvature vertices");
        out.segment((s - 1) * bins, bins) /= static_cast<double>(count);
    }
    return out;
}

void save_features_csv(const std::vector<FeatureVector>& features, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "segment_id,vertex_id,I,C,theta";
    for (int i = 0; i < kGcdBins; ++i) out << ",gcd_" << i;
    out << '\n';
    for (const auto& f : features) {
        out << f.segment_id << ',' << f.vertex_id << ',' << f.shape_index << ',' << f.curvedness << ','
            << f.normal_orientation;
        for (double g : f.gcd) out << ',' << g;
        out << '\n';
    }
}

std::vector<FeatureVector> load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::vector<FeatureVector> out;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        FeatureVector f;
        char comma;
        ls >> f.segment_id >> comma >> f.vertex_id >> comma >> f.shape_index >> comma >> f.curvedness >>
            comma >> f.normal_orientation;
        for (auto& g : f.gcd) ls >> comma >> g;
        if (!ls) throw std::runtime_error(path + ": malformed feature row '" + line + "'");
        out.push_back(f);
    }
    return out;
}

void save_features_json(const std::vector<FeatureVector>& features, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& f : features) {
        nlohmann::json j;
        j["segment_id"] = f.segment_id;
        j["vertex_id"] = f.vertex_id;
        j["I"] = f.shape_index;
        j["C"] = f.curvedness;
        j["theta"] = f.normal_orientation;
        j["gcd"] = f.gcd;
        arr.push_back(std::move(j));
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << arr.dump(2) << '\n';
}

}  // namespace lvm
