#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace lvm {

/// k-means vocabulary over 23-dimensional feature vectors. Features are
/// z-scored with training-set statistics before clustering; the same
/// statistics are reapplied at quantization time.
struct Vocabulary {
    Eigen::MatrixXd centroids;     // k x d, in standardized space
    Eigen::VectorXd feature_mean;  // d
    Eigen::VectorXd feature_std;   // d, zero-variance dims pinned to 1
    int iterations_run = 0;
    double inertia = 0.0;
    std::uint64_t seed = 0;

    int k() const { return static_cast<int>(centroids.rows()); }
    int dim() const { return static_cast<int>(centroids.cols()); }
};

struct BoFHistogram {
    Eigen::VectorXd frequencies;  // k entries, sums to 1
    int segment_id = 0;           // 0 = whole surface
};

/// Lloyd iterations from k-means++ seeding until the assignment reaches a
/// fixed point or max_iter. Deterministic per seed; empty clusters are
/// re-seeded to the point farthest from its centroid. Inertia is checked
/// to be non-increasing every iteration.
Vocabulary build_vocabulary(const Eigen::MatrixXd& features, int k, std::uint64_t seed,
                            int max_iter = 100);

/// Nearest-centroid counts normalized to frequencies; distance ties break
/// toward the lower centroid index.
BoFHistogram quantize(const Eigen::MatrixXd& features, const Vocabulary& vocabulary);

void save_vocabulary_json(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocabulary_json(const std::string& path);

}  // namespace lvm
