#pragma once

#include "lvmorph/aha.hpp"
#include "lvmorph/bof.hpp"
#include "lvmorph/features.hpp"
#include "lvmorph/learn.hpp"
#include "lvmorph/mesh.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lvm {

struct ManifestSubject {
    std::string id;
    std::string mesh_path;
    std::string landmarks_path;
    std::string features_csv;              // optional precomputed features
    std::map<std::string, double> percent_ds;  // keys LAD/RCA/LCX
};

/// JSON manifest: {"subjects":[{"id","mesh","landmarks","ds":{...},"features"?}]}.
/// Relative paths resolve against the manifest's directory.
std::vector<ManifestSubject> load_manifest(const std::string& path);

/// Feature vectors for all 17 segments of one surface.
std::vector<FeatureVector> subject_features(const TriangleMesh& mesh, const Landmarks& landmarks,
                                            const FeatureParams& params);

Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features);
Eigen::MatrixXd segment_feature_matrix(const std::vector<FeatureVector>& features, int segment_id);

struct ClassifierConfig {
    std::string method = "lda-knn";  // or "mlp"
    int knn_k = 1;
    int mlp_hidden = 10;
    int mlp_epochs = 2000;
    double mlp_learning_rate = 0.3;
    int vocab_k = 20;
    std::uint64_t vocab_seed = 0;
    int kmeans_max_iter = 100;
    double regression_ridge = 0.0;
};

/// Whole-surface classification, strict leave-one-out: every fold
/// retrains the vocabulary on the pooled training features, quantizes
/// training and held-out subjects with it, and refits the classifier.
LooClassificationResult classify_global_loo(const std::vector<Eigen::MatrixXd>& subject_features,
                                            const std::vector<int>& labels,
                                            const ClassifierConfig& config);

/// Per-segment localized classification; index s-1 holds segment s.
std::array<LooClassificationResult, 17> classify_local_loo(
    const std::vector<std::array<Eigen::MatrixXd, 17>>& subject_segment_features,
    const std::vector<std::array<int, 17>>& labels, const ClassifierConfig& config);

/// Per-segment leave-one-out regression against exact percent DS; returns
/// the Pearson correlation per segment (nullopt when it is undefined,
/// e.g. constant targets).
std::array<std::optional<double>, 17> regress_local_loo(
    const std::vector<std::array<Eigen::MatrixXd, 17>>& subject_segment_features,
    const std::vector<std::array<double, 17>>& percent_ds, const ClassifierConfig& config);

}  // namespace lvm
