#include "lvmorph/bof.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace lvm {

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& x) {
    int best = 0;
    double best_d = (centroids.row(0) - x).squaredNorm();
    for (int c = 1; c < centroids.rows(); ++c) {
        const double d = (centroids.row(c) - x).squaredNorm();
        if (d < best_d) {  // ties keep the lower index
            best_d = d;
            best = c;
        }
    }
    return best;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& X, int k, std::mt19937_64& rng) {
    const Eigen::Index m = X.rows();
    Eigen::MatrixXd centroids(k, X.cols());
    const Eigen::Index first = std::min<Eigen::Index>(m - 1, static_cast<Eigen::Index>(unit_double(rng) * static_cast<double>(m)));
    centroids.row(0) = X.row(first);

    Eigen::VectorXd d2 = (X.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index chosen = 0;
        if (total > 0) {
            const double target = unit_double(rng) * total;
            double acc = 0.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = static_cast<Eigen::Index>(c) % m;  // all remaining points coincide
        }
        centroids.row(c) = X.row(chosen);
        d2 = d2.cwiseMin((X.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

}  // namespace

Vocabulary build_vocabulary(const Eigen::MatrixXd& features, int k, std::uint64_t seed, int max_iter) {
    const Eigen::Index m = features.rows();
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (m < k) throw std::invalid_argument("fewer features than clusters");
    if (!features.allFinite()) throw std::invalid_argument("features must be finite");

    Vocabulary vocab;
    vocab.seed = seed;
    vocab.feature_mean = features.colwise().mean();
    Eigen::MatrixXd X = features.rowwise() - vocab.feature_mean.transpose();
    vocab.feature_std = (X.array().square().colwise().mean()).sqrt();
    for (Eigen::Index j = 0; j < vocab.feature_std.size(); ++j)
        if (vocab.feature_std[j] <= 0) vocab.feature_std[j] = 1.0;
    X.array().rowwise() /= vocab.feature_std.transpose().array();

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centroids = kmeanspp_seed(X, k, rng);

    std::vector<int> assign(static_cast<size_t>(m), -1);
    double prev_inertia = std::numeric_limits<double>::infinity();
    int iterations = 0;
    for (int it = 0; it < max_iter; ++it) {
        ++iterations;
        bool changed = false;
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const int c = nearest_centroid(centroids, X.row(i));
            if (c != assign[static_cast<size_t>(i)]) changed = true;
            assign[static_cast<size_t>(i)] = c;
            inertia += (X.row(i) - centroids.row(c)).squaredNorm();
        }
        if (inertia > prev_inertia * (1.0 + 1e-12) + 1e-12)
            throw std::logic_error("k-means inertia increased; Lloyd contract violated");
        prev_inertia = inertia;
        vocab.inertia = inertia;
        if (!changed) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
        Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
        for (Eigen::Index i = 0; i < m; ++i) {
            sums.row(assign[static_cast<size_t>(i)]) += X.row(i);
            ++counts[assign[static_cast<size_t>(i)]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centroids.row(c) = sums.row(c) / counts[c];
            } else {
                // Re-seed an empty cluster at the point farthest from its
                // current centroid.
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < m; ++i) {
                    const double d = (X.row(i) - centroids.row(assign[static_cast<size_t>(i)])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids.row(c) = X.row(far);
                prev_inertia = std::numeric_limits<double>::infinity();  // assignments will be re-derived
            }
        }
    }

    vocab.centroids = std::move(centroids);
    vocab.iterations_run = iterations;
    return vocab;
}

BoFHistogram quantize(const Eigen::MatrixXd& features, const Vocabulary& vocabulary) {
    if (features.rows() < 1) throw std::invalid_argument("quantize: empty feature set");
    if (features.cols() != vocabulary.dim())
        throw std::invalid_argument("quantize: feature dimension does not match vocabulary");

    BoFHistogram h;
    h.frequencies = Eigen::VectorXd::Zero(vocabulary.k());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        Eigen::RowVectorXd x = (features.row(i) - vocabulary.feature_mean.transpose()).array() /
                               vocabulary.feature_std.transpose().array();
        h.frequencies[nearest_centroid(vocabulary.centroids, x)] += 1.0;
    }
    h.frequencies /= static_cast<double>(features.rows());
    return h;
}

void save_vocabulary_json(const Vocabulary& vocab, const std::string& path) {
    nlohmann::json j;
    j["k"] = vocab.k();
    j["dim"] = vocab.dim();
    j["seed"] = vocab.seed;
    j["iterations_run"] = vocab.iterations_run;
    j["inertia"] = vocab.inertia;
    j["feature_mean"] = std::vector<double>(vocab.feature_mean.data(),
                                            vocab.feature_mean.data() + vocab.feature_mean.size());
    j["feature_std"] = std::vector<double>(vocab.feature_std.data(),
                                           vocab.feature_std.data() + vocab.feature_std.size());
    nlohmann::json rows = nlohmann::json::array();
    for (int c = 0; c < vocab.k(); ++c) {
        std::vector<double> row(static_cast<size_t>(vocab.dim()));
        for (int i = 0; i < vocab.dim(); ++i) row[static_cast<size_t>(i)] = vocab.centroids(c, i);
        rows.push_back(std::move(row));
    }
    j["centroids"] = std::move(rows);

    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << j.dump(2) << '\n';
}

Vocabulary load_vocabulary_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": invalid JSON: " + e.what());
    }
    Vocabulary v;
    const int k = j.at("k").get<int>(), d = j.at("dim").get<int>();
    v.seed = j.value("seed", std::uint64_t{0});
    v.iterations_run = j.value("iterations_run", 0);
    v.inertia = j.value("inertia", 0.0);
    v.feature_mean = Eigen::VectorXd(d);
    v.feature_std = Eigen::VectorXd(d);
    for (int i = 0; i < d; ++i) {
        v.feature_mean[i] = j.at("feature_mean").at(i).get<double>();
        v.feature_std[i] = j.at("feature_std").at(i).get<double>();
    }
    v.centroids = Eigen::MatrixXd(k, d);
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < d; ++i) v.centroids(c, i) = j.at("centroids").at(c).at(i).get<double>();
    return v;
}

}  // namespace lvm
