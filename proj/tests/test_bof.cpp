#include "lvmorph/bof.hpp"

#include <doctest/doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

using namespace lvm;

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Two Gaussian-ish blobs in d dimensions, 500 points each.
Eigen::MatrixXd two_blobs(int d, double sigma, std::mt19937_64& rng) {
    Eigen::MatrixXd X(1000, d);
    for (int i = 0; i < 1000; ++i) {
        const double center = i < 500 ? 0.0 : 10.0;
        for (int j = 0; j < d; ++j)
            X(i, j) = center + sigma * (2.0 * unit_double(rng) - 1.0);
    }
    return X;
}

Eigen::MatrixXd unstandardized_centroids(const Vocabulary& v) {
    Eigen::MatrixXd C = v.centroids;
    for (int i = 0; i < C.rows(); ++i)
        C.row(i) = C.row(i).cwiseProduct(v.feature_std.transpose()) + v.feature_mean.transpose();
    return C;
}

}  // namespace

TEST_CASE("k equals n reproduces the points with zero inertia") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd X(20, 5);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 5; ++j) X(i, j) = 10.0 * unit_double(rng);
    Vocabulary v = build_vocabulary(X, 20, 4);
    CHECK(v.k() == 20);
    CHECK(v.inertia == doctest::Approx(0.0).epsilon(1e-20));
    // Every point quantizes to its own (unique) centroid.
    BoFHistogram h = quantize(X, v);
    for (int i = 0; i < 20; ++i) CHECK(h.frequencies[i] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("two-blob centroid recovery") {
    std::mt19937_64 rng(2);
    Eigen::MatrixXd X = two_blobs(23, 0.1, rng);
    Vocabulary v = build_vocabulary(X, 2, 11);
    Eigen::MatrixXd C = unstandardized_centroids(v);

    // Sample means per blob are the oracle.
    Eigen::RowVectorXd mean0 = X.topRows(500).colwise().mean();
    Eigen::RowVectorXd mean1 = X.bottomRows(500).colwise().mean();
    const int i0 = (C.row(0) - mean0).norm() < (C.row(1) - mean0).norm() ? 0 : 1;
    CHECK((C.row(i0) - mean0).cwiseAbs().maxCoeff() < 0.05);
    CHECK((C.row(1 - i0) - mean1).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("vocabulary construction is bitwise deterministic") {
    std::mt19937_64 rng(3);
    Eigen::MatrixXd X = two_blobs(23, 0.5, rng);
    Vocabulary a = build_vocabulary(X, 7, 123);
    Vocabulary b = build_vocabulary(X, 7, 123);
    CHECK((a.centroids.array() == b.centroids.array()).all());
    CHECK(a.inertia == b.inertia);
    CHECK(a.iterations_run == b.iterations_run);
}

TEST_CASE("fewer features than k is rejected") {
    Eigen::MatrixXd X(3, 23);
    X.setRandom();
    CHECK_THROWS(build_vocabulary(X, 5, 0));
}

TEST_CASE("quantize") {
    // Hand-built vocabulary: identity standardization, two centroids.
    Vocabulary v;
    v.centroids = Eigen::MatrixXd(2, 3);
    v.centroids << 0, 0, 0, 10, 10, 10;
    v.feature_mean = Eigen::VectorXd::Zero(3);
    v.feature_std = Eigen::VectorXd::Ones(3);

    SUBCASE("exact centroid match is one-hot") {
        Eigen::MatrixXd X = v.centroids.row(1);
        BoFHistogram h = quantize(X, v);
        CHECK(h.frequencies[0] == 0.0);
        CHECK(h.frequencies[1] == 1.0);
    }
    SUBCASE("300/200 split gives (0.6, 0.4)") {
        Eigen::MatrixXd X(500, 3);
        for (int i = 0; i < 500; ++i)
            X.row(i) = i < 300 ? Eigen::RowVector3d(1, 0, 0) : Eigen::RowVector3d(9, 10, 11);
        BoFHistogram h = quantize(X, v);
        CHECK(h.frequencies[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(h.frequencies[1] == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(h.frequencies.sum() == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("empty feature set is rejected") {
        Eigen::MatrixXd X(0, 3);
        CHECK_THROWS(quantize(X, v));
    }
}

TEST_CASE("quantize is permutation-equivariant in centroid order") {
    std::mt19937_64 rng(4);
    Eigen::MatrixXd X = two_blobs(6, 1.0, rng);
    Vocabulary v = build_vocabulary(X, 4, 9);

    Vocabulary permuted = v;
    const int perm[4] = {2, 0, 3, 1};
    for (int i = 0; i < 4; ++i) permuted.centroids.row(perm[i]) = v.centroids.row(i);

    BoFHistogram a = quantize(X, v);
    BoFHistogram b = quantize(X, permuted);
    for (int i = 0; i < 4; ++i) CHECK(a.frequencies[i] == b.frequencies[perm[i]]);
}

TEST_CASE("vocabulary JSON round trip") {
    std::mt19937_64 rng(5);
    Eigen::MatrixXd X = two_blobs(23, 0.3, rng);
    Vocabulary v = build_vocabulary(X, 5, 77);
    const std::string path =
        (std::filesystem::temp_directory_path() / "lvm_vocab.json").string();
    save_vocabulary_json(v, path);
    Vocabulary back = load_vocabulary_json(path);
    CHECK((back.centroids - v.centroids).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.feature_mean - v.feature_mean).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.feature_std - v.feature_std).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.seed == v.seed);
    // Identical quantization behaviour after the round trip.
    BoFHistogram a = quantize(X, v), b = quantize(X, back);
    CHECK((a.frequencies - b.frequencies).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("centroids are pairwise distinct") {
    std::mt19937_64 rng(6);
    Eigen::MatrixXd X = two_blobs(10, 2.0, rng);
    Vocabulary v = build_vocabulary(X, 6, 13);
    for (int i = 0; i < v.k(); ++i)
        for (int j = i + 1; j < v.k(); ++j)
            CHECK((v.centroids.row(i) - v.centroids.row(j)).norm() > 1e-12);
}
