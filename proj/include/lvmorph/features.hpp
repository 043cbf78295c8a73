#pragma once

#include "lvmorph/aha.hpp"
#include "lvmorph/curvature.hpp"
#include "lvmorph/mesh.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lvm {

inline constexpr int kGcdBins = 20;
inline constexpr int kFeatureDim = 23;  // I, C, theta, 20 GCD bins

/// 23-tuple per sampled surface point.
struct FeatureVector {
    int segment_id = 0;
    int vertex_id = 0;
    double shape_index = 0.0;              // [0,1]
    double curvedness = 0.0;               // 1/mm
    double normal_orientation = 0.0;       // [0, pi/2]
    std::array<double, kGcdBins> gcd{};    // sums to 1

    Eigen::Matrix<double, kFeatureDim, 1> as_vector() const;
};

struct SampleSet {
    int segment_id = 0;
    std::vector<int> vertex_ids;
    std::uint64_t seed = 0;
};

struct FeatureParams {
    int ring_depth = 2;
    int samples_per_segment = 500;
    std::uint64_t seed = 0;
};

/// Distances scaled by norm_max (default: their maximum), binned uniformly
/// on [0,1] with a right-closed last bin, normalized to sum 1.
std::array<double, kGcdBins> gcd_histogram(const std::vector<double>& distances,
                                           double norm_max = -1.0);

/// Uniform sample without replacement from the segment's vertices; the
/// whole segment when it holds fewer than n. Deterministic per seed.
SampleSet sample_points(const SegmentLabeling& labeling, int segment_id, int n, std::uint64_t seed);

struct SegmentFeatures {
    std::vector<FeatureVector> vectors;
    int skipped_invalid_curvature = 0;
};

/// One feature vector per sampled point of the segment; GCD computed from
/// pairwise graph geodesics among the segment's samples, normalized by the
/// segment-wide maximum sampled distance.
SegmentFeatures feature_vectors(const TriangleMesh& mesh, const CurvatureField& curvature,
                                const SegmentLabeling& labeling, int segment_id,
                                const FeatureParams& params);

/// Per-segment 20-bin shape index histograms over all valid vertices,
/// flattened row-major segments 1..17 (340 values).
Eigen::VectorXd shape_index_histogram(const TriangleMesh& mesh, const CurvatureField& curvature,
                                      const SegmentLabeling& labeling, int bins = 20);

void save_features_csv(const std::vector<FeatureVector>& features, const std::string& path);
std::vector<FeatureVector> load_features_csv(const std::string& path);
void save_features_json(const std::vector<FeatureVector>& features, const std::string& path);

}  // namespace lvm
