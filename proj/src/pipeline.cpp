#include "lvmorph/pipeline.hpp"

#include "lvmorph/curvature.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace lvm {

namespace {

Eigen::MatrixXd pool_features(const std::vector<Eigen::MatrixXd>& sets,
                              const std::vector<bool>& include) {
    Eigen::Index total = 0, dim = 0;
    for (size_t i = 0; i < sets.size(); ++i) {
        if (!include[i]) continue;
        total += sets[i].rows();
        dim = sets[i].cols();
    }
    Eigen::MatrixXd pooled(total, dim);
    Eigen::Index at = 0;
    for (size_t i = 0; i < sets.size(); ++i) {
        if (!include[i]) continue;
        pooled.middleRows(at, sets[i].rows()) = sets[i];
        at += sets[i].rows();
    }
    return pooled;
}

// One LOO fold of the BoF pipeline: vocabulary + classifier retrained on
// the training subjects, the held-out subject quantized with the fold's
// vocabulary.
int predict_fold(const std::vector<Eigen::MatrixXd>& features, const std::vector<int>& labels,
                 size_t held, const ClassifierConfig& config) {
    std::vector<bool> in_train(features.size(), true);
    in_train[held] = false;

    const Eigen::MatrixXd pooled = pool_features(features, in_train);
    const Vocabulary vocab = build_vocabulary(pooled, config.vocab_k, config.vocab_seed,
                                              config.kmeans_max_iter);

    Eigen::MatrixXd X(static_cast<Eigen::Index>(features.size()) - 1, config.vocab_k);
    std::vector<int> y;
    Eigen::Index at = 0;
    for (size_t i = 0; i < features.size(); ++i) {
        if (i == held) continue;
        X.row(at++) = quantize(features[i], vocab).frequencies.transpose();
        y.push_back(labels[i]);
    }
    const Eigen::VectorXd query = quantize(features[held], vocab).frequencies;

    if (config.method == "lda-knn") {
        const LDAModel lda = lda_fit(X, y);
        std::vector<double> scalars(static_cast<size_t>(X.rows()));
        for (Eigen::Index i = 0; i < X.rows(); ++i) scalars[static_cast<size_t>(i)] = lda_project(lda, X.row(i).transpose());
        return knn_classify(scalars, y, lda_project(lda, query), config.knn_k);
    }
    if (config.method == "mlp") {
        const MLPModel mlp = mlp_train(X, y, config.mlp_hidden, config.mlp_epochs,
                                       config.mlp_learning_rate, config.vocab_seed);
        return mlp_predict(mlp, query);
    }
    throw std::invalid_argument("unknown classifier method '" + config.method + "'");
}

}  // namespace

std::vector<ManifestSubject> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        const std::filesystem::path fp(p);
        return fp.is_absolute() ? p : (base / fp).string();
    };

    std::vector<ManifestSubject> subjects;
    for (const auto& sj : j.at("subjects")) {
        ManifestSubject s;
        s.id = sj.at("id").get<std::string>();
        s.mesh_path = resolve(sj.value("mesh", ""));
        s.landmarks_path = resolve(sj.value("landmarks", ""));
        s.features_csv = resolve(sj.value("features", ""));
        if (sj.contains("ds"))
            for (const auto& [artery, value] : sj["ds"].items()) s.percent_ds[artery] = value.get<double>();
        subjects.push_back(std::move(s));
    }
    if (subjects.empty()) throw std::runtime_error(path + ": manifest lists no subjects");
    return subjects;
}

std::vector<FeatureVector> subject_features(const TriangleMesh& mesh, const Landmarks& landmarks,
                                            const FeatureParams& params) {
    const SegmentLabeling labeling = partition_17(mesh, landmarks);
    const CurvatureField curvature = estimate_curvatures(mesh, params.ring_depth);
    std::vector<FeatureVector> all;
    for (int s = 1; s <= 17; ++s) {
        auto seg = feature_vectors(mesh, curvature, labeling, s, params);
        all.insert(all.end(), seg.vectors.begin(), seg.vectors.end());
    }
    return all;
}

Eigen::MatrixXd feature_matrix(const std::vector<FeatureVector>& features) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(features.size()), kFeatureDim);
    for (size_t i = 0; i < features.size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) = features[i].as_vector().transpose();
    return X;
}

Eigen::MatrixXd segment_feature_matrix(const std::vector<FeatureVector>& features, int segment_id) {
    std::vector<const FeatureVector*> picked;
    for (const auto& f : features)
        if (f.segment_id == segment_id) picked.push_back(&f);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(picked.size()), kFeatureDim);
    for (size_t i = 0; i < picked.size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) = picked[i]->as_vector().transpose();
    return X;
}

LooClassificationResult classify_global_loo(const std::vector<Eigen::MatrixXd>& subject_features,
                                            const std::vector<int>& labels,
                                            const ClassifierConfig& config) {
    if (subject_features.size() != labels.size())
        throw std::invalid_argument("classify_global_loo: label count mismatch");
    if (subject_features.size() < 2)
        throw std::invalid_argument("classify_global_loo needs at least 2 subjects");

    LooClassificationResult result;
    for (size_t held = 0; held < subject_features.size(); ++held) {
        int ones = 0, zeros = 0;
        for (size_t i = 0; i < labels.size(); ++i) {
            if (i == held) continue;
            (labels[i] == 1 ? ones : zeros)++;
        }
        if (ones == 0 || zeros == 0) {
            ++result.skipped_folds;
            continue;
        }
        const int predicted = predict_fold(subject_features, labels, held, config);
        ++result.confusion.counts[labels[held] == 1 ? 0 : 1][predicted == 1 ? 0 : 1];
    }
    return result;
}

std::array<LooClassificationResult, 17> classify_local_loo(
    const std::vector<std::array<Eigen::MatrixXd, 17>>& subject_segment_features,
    const std::vector<std::array<int, 17>>& labels, const ClassifierConfig& config) {
    if (subject_segment_features.size() != labels.size())
        throw std::invalid_argument("classify_local_loo: label count mismatch");

    std::array<LooClassificationResult, 17> out;
    for (int s = 0; s < 17; ++s) {
        std::vector<Eigen::MatrixXd> feats;
        std::vector<int> y;
        for (size_t i = 0; i < subject_segment_features.size(); ++i) {
            feats.push_back(subject_segment_features[i][static_cast<size_t>(s)]);
            y.push_back(labels[i][static_cast<size_t>(s)]);
        }
        out[static_cast<size_t>(s)] = classify_global_loo(feats, y, config);
    }
    return out;
}

std::array<std::optional<double>, 17> regress_local_loo(
    const std::vector<std::array<Eigen::MatrixXd, 17>>& subject_segment_features,
    const std::vector<std::array<double, 17>>& percent_ds, const ClassifierConfig& config) {
    if (subject_segment_features.size() != percent_ds.size())
        throw std::invalid_argument("regress_local_loo: target count mismatch");
    const size_t m = subject_segment_features.size();
    if (m < 3) throw std::invalid_argument("regress_local_loo needs at least 3 subjects");

    std::array<std::optional<double>, 17> out;
    for (int s = 0; s < 17; ++s) {
        Eigen::VectorXd predictions(static_cast<Eigen::Index>(m));
        Eigen::VectorXd truth(static_cast<Eigen::Index>(m));
        for (size_t held = 0; held < m; ++held) {
            std::vector<bool> in_train(m, true);
            in_train[held] = false;

            std::vector<Eigen::MatrixXd> feats;
            for (size_t i = 0; i < m; ++i) feats.push_back(subject_segment_features[i][static_cast<size_t>(s)]);
            const Eigen::MatrixXd pooled = pool_features(feats, in_train);
            const Vocabulary vocab =
                build_vocabulary(pooled, config.vocab_k, config.vocab_seed, config.kmeans_max_iter);

            Eigen::MatrixXd X(static_cast<Eigen::Index>(m) - 1, config.vocab_k);
            Eigen::VectorXd y(static_cast<Eigen::Index>(m) - 1);
            Eigen::Index at = 0;
            for (size_t i = 0; i < m; ++i) {
                if (i == held) continue;
                X.row(at) = quantize(feats[i], vocab).frequencies.transpose();
                y[at++] = percent_ds[i][static_cast<size_t>(s)];
            }
            const RegressionModel model = mvr_fit(X, y, config.regression_ridge);
            predictions[static_cast<Eigen::Index>(held)] =
                mvr_predict(model, quantize(feats[held], vocab).frequencies);
            truth[static_cast<Eigen::Index>(held)] = percent_ds[held][static_cast<size_t>(s)];
        }
        try {
            out[static_cast<size_t>(s)] = pearson_correlation(predictions, truth);
        } catch (const std::invalid_argument&) {
            out[static_cast<size_t>(s)] = std::nullopt;  // zero-variance targets or predictions
        }
    }
    return out;
}

}  // namespace lvm
