#include "lvmorph/learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lvm {

namespace {

double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_binary_labels(const std::vector<int>& labels) {
    for (int l : labels)
        if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 (normal) or 1 (diseased)");
}

}  // namespace

LDAModel lda_fit(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    const Eigen::Index m = X.rows(), d = X.cols();
    if (static_cast<size_t>(m) != labels.size()) throw std::invalid_argument("label count mismatch");
    if (m < 3) throw std::invalid_argument("lda_fit needs at least 3 samples");
    check_binary_labels(labels);

    long n1 = std::count(labels.begin(), labels.end(), 1);
    long n0 = static_cast<long>(m) - n1;
    if (n1 == 0 || n0 == 0) throw std::invalid_argument("lda_fit needs both classes present");

    LDAModel model;
    model.global_mean = X.colwise().mean();
    model.class_mean_diseased = Eigen::VectorXd::Zero(d);
    model.class_mean_normal = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < m; ++i)
        (labels[static_cast<size_t>(i)] == 1 ? model.class_mean_diseased : model.class_mean_normal) +=
            X.row(i).transpose();
    model.class_mean_diseased /= static_cast<double>(n1);
    model.class_mean_normal /= static_cast<double>(n0);

    model.within_scatter = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::VectorXd dev =
            X.row(i).transpose() -
            (labels[static_cast<size_t>(i)] == 1 ? model.class_mean_diseased : model.class_mean_normal);
        model.within_scatter += dev * dev.transpose();
    }
    model.between_scatter = Eigen::MatrixXd::Zero(d, d);
    for (const auto* mu : {&model.class_mean_diseased, &model.class_mean_normal}) {
        const Eigen::VectorXd dev = *mu - model.global_mean;
        model.between_scatter += dev * dev.transpose();
    }

    const Eigen::VectorXd mean_diff = model.class_mean_diseased - model.class_mean_normal;
    if (mean_diff.norm() < 1e-12)
        throw std::invalid_argument("lda_fit: identical class means give a degenerate direction");

    bool singular = m <= d;
    if (!singular) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(model.within_scatter);
        singular = lu.rank() < d;
    }
    model.ridge = singular ? 1e-6 * model.within_scatter.trace() / static_cast<double>(d) : 0.0;

    Eigen::MatrixXd Sw = model.within_scatter;
    Sw.diagonal().array() += model.ridge;
    model.projection = Sw.ldlt().solve(mean_diff);
    const double norm = model.projection.norm();
    if (!(norm > 0) || !model.projection.allFinite())
        throw std::runtime_error("lda_fit: projection solve failed");
    model.projection /= norm;
    return model;
}

double lda_project(const LDAModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.projection.size())
        throw std::invalid_argument("lda_project: dimension mismatch");
    return model.projection.dot(x - model.global_mean);
}

int knn_classify(const std::vector<double>& train_scalars, const std::vector<int>& train_labels,
                 double query_scalar, int k) {
    const size_t m = train_scalars.size();
    if (m != train_labels.size()) throw std::invalid_argument("knn: label count mismatch");
    if (k % 2 == 0) throw std::invalid_argument("knn: k must be odd");
    if (k < 1 || static_cast<size_t>(k) > m) throw std::invalid_argument("knn: k out of range");

    std::vector<size_t> order(m);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double da = std::abs(train_scalars[a] - query_scalar);
        const double db = std::abs(train_scalars[b] - query_scalar);
        return da != db ? da < db : a < b;
    });
    int votes = 0;
    for (int i = 0; i < k; ++i) votes += train_labels[order[static_cast<size_t>(i)]];
    return 2 * votes > k ? 1 : 0;
}

Eigen::VectorXd mlp_parameters(const MLPModel& model) {
    const Eigen::Index h = model.w1.rows(), d = model.w1.cols();
    Eigen::VectorXd theta(h * d + h + h + 1);
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < d; ++j) theta[at++] = model.w1(i, j);
    for (Eigen::Index i = 0; i < h; ++i) theta[at++] = model.b1[i];
    for (Eigen::Index i = 0; i < h; ++i) theta[at++] = model.w2[i];
    theta[at++] = model.b2;
    return theta;
}

void mlp_set_parameters(MLPModel& model, const Eigen::VectorXd& theta) {
    const Eigen::Index h = model.w1.rows(), d = model.w1.cols();
    if (theta.size() != h * d + 2 * h + 1) throw std::invalid_argument("parameter vector size mismatch");
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < h; ++i)
        for (Eigen::Index j = 0; j < d; ++j) model.w1(i, j) = theta[at++];
    for (Eigen::Index i = 0; i < h; ++i) model.b1[i] = theta[at++];
    for (Eigen::Index i = 0; i < h; ++i) model.w2[i] = theta[at++];
    model.b2 = theta[at++];
}

double mlp_predict_probability(const MLPModel& model, const Eigen::VectorXd& x) {
    if (x.size() != model.w1.cols()) throw std::invalid_argument("mlp_predict: dimension mismatch");
    const Eigen::VectorXd a1 = ((model.w1 * x + model.b1).array().unaryExpr([](double z) {
        return logistic(z);
    })).matrix();
    return logistic(model.w2.dot(a1) + model.b2);
}

int mlp_predict(const MLPModel& model, const Eigen::VectorXd& x) {
    return mlp_predict_probability(model, x) >= 0.5 ? 1 : 0;
}

double mlp_loss(const MLPModel& model, const Eigen::MatrixXd& X, const std::vector<int>& labels) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const double o = mlp_predict_probability(model, X.row(i).transpose());
        const double e = o - labels[static_cast<size_t>(i)];
        loss += e * e;
    }
    return loss / static_cast<double>(X.rows());
}

Eigen::VectorXd mlp_gradient(const MLPModel& model, const Eigen::MatrixXd& X,
                             const std::vector<int>& labels) {
    const Eigen::Index m = X.rows(), h = model.w1.rows(), d = model.w1.cols();
    Eigen::MatrixXd gw1 = Eigen::MatrixXd::Zero(h, d);
    Eigen::VectorXd gb1 = Eigen::VectorXd::Zero(h);
    Eigen::RowVectorXd gw2 = Eigen::RowVectorXd::Zero(h);
    double gb2 = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::VectorXd x = X.row(i).transpose();
        const Eigen::VectorXd a1 =
            ((model.w1 * x + model.b1).array().unaryExpr([](double z) { return logistic(z); })).matrix();
        const double o = logistic(model.w2.dot(a1) + model.b2);
        const double g2 = 2.0 / static_cast<double>(m) * (o - labels[static_cast<size_t>(i)]) * o * (1.0 - o);
        gw2 += g2 * a1.transpose();
        gb2 += g2;
        const Eigen::VectorXd delta1 =
            (model.w2.transpose() * g2).cwiseProduct(a1.cwiseProduct(Eigen::VectorXd::Ones(h) - a1));
        gw1 += delta1 * x.transpose();
        gb1 += delta1;
    }
    MLPModel grads = model;
    grads.w1 = gw1;
    grads.b1 = gb1;
    grads.w2 = gw2;
    grads.b2 = gb2;
    return mlp_parameters(grads);
}

MLPModel mlp_train(const Eigen::MatrixXd& X, const std::vector<int>& labels, int hidden, int epochs,
                   double learning_rate, std::uint64_t seed) {
    if (X.rows() < 2) throw std::invalid_argument("mlp_train needs at least 2 samples");
    if (hidden < 1) throw std::invalid_argument("hidden width must be >= 1");
    if (static_cast<size_t>(X.rows()) != labels.size())
        throw std::invalid_argument("label count mismatch");
    check_binary_labels(labels);

    MLPModel model;
    model.learning_rate = learning_rate;
    model.seed = seed;
    model.w1 = Eigen::MatrixXd(hidden, X.cols());
    model.b1 = Eigen::VectorXd(hidden);
    model.w2 = Eigen::RowVectorXd(hidden);
    std::mt19937_64 rng(seed);
    auto init = [&]() { return unit_double(rng) - 0.5; };
    for (Eigen::Index i = 0; i < model.w1.rows(); ++i)
        for (Eigen::Index j = 0; j < model.w1.cols(); ++j) model.w1(i, j) = init();
    for (Eigen::Index i = 0; i < hidden; ++i) model.b1[i] = init();
    for (Eigen::Index i = 0; i < hidden; ++i) model.w2[i] = init();
    model.b2 = init();

    for (int epoch = 0; epoch < epochs; ++epoch) {
        const Eigen::VectorXd grad = mlp_gradient(model, X, labels);
        Eigen::VectorXd theta = mlp_parameters(model) - learning_rate * grad;
        if (!theta.allFinite())
            throw std::runtime_error("mlp_train diverged (non-finite loss) at epoch " +
                                     std::to_string(epoch));
        mlp_set_parameters(model, theta);
        model.epochs_run = epoch + 1;
    }
    return model;
}

RegressionModel mvr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge) {
    const Eigen::Index m = X.rows(), n = X.cols();
    if (m < 2) throw std::invalid_argument("mvr_fit needs at least 2 samples");
    if (y.size() != m) throw std::invalid_argument("mvr_fit: target count mismatch");
    if (!X.allFinite() || !y.allFinite()) throw std::invalid_argument("mvr_fit: non-finite inputs");

    Eigen::MatrixXd design(m, n + 1);
    design.col(0).setOnes();
    design.rightCols(n) = X;

    RegressionModel model;
    if (ridge > 0) {
        Eigen::MatrixXd normal = design.transpose() * design;
        for (Eigen::Index i = 1; i <= n; ++i) normal(i, i) += ridge;  // intercept unpenalized
        model.coefficients = normal.ldlt().solve(design.transpose() * y);
        model.rank_deficient = false;
    } else {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
        model.coefficients = cod.solve(y);  // minimum-norm least squares
        model.rank_deficient = cod.rank() < n + 1 || m <= n + 1;
    }
    const Eigen::VectorXd residual = y - design * model.coefficients;
    model.training_mse = residual.squaredNorm() / static_cast<double>(m);
    return model;
}

double mvr_predict(const RegressionModel& model, const Eigen::VectorXd& x) {
    if (x.size() + 1 != model.coefficients.size())
        throw std::invalid_argument("mvr_predict: dimension mismatch");
    return model.coefficients[0] + model.coefficients.tail(x.size()).dot(x);
}

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson_correlation needs equal lengths >= 2");
    const Eigen::VectorXd da = a.array() - a.mean();
    const Eigen::VectorXd db = b.array() - b.mean();
    const double sa = da.norm(), sb = db.norm();
    if (!(sa > 0) || !(sb > 0)) throw std::invalid_argument("pearson_correlation: zero-variance input");
    return std::clamp(da.dot(db) / (sa * sb), -1.0, 1.0);
}

int binarize_ds(double percent_ds) {
    if (percent_ds < 0.0 || percent_ds > 100.0)
        throw std::invalid_argument("percent DS must lie in [0, 100]");
    return percent_ds >= kDsThreshold ? 1 : 0;
}

double ConfusionMatrix::accuracy() const {
    return static_cast<double>(counts[0][0] + counts[1][1]) / static_cast<double>(total());
}

double ConfusionMatrix::false_alarm_rate() const {
    const long normals = counts[1][0] + counts[1][1];
    return normals == 0 ? 0.0 : static_cast<double>(counts[1][0]) / static_cast<double>(normals);
}

double ConfusionMatrix::miss_rate() const {
    const long diseased = counts[0][0] + counts[0][1];
    return diseased == 0 ? 0.0 : static_cast<double>(counts[0][1]) / static_cast<double>(diseased);
}

ConfusionMatrix make_confusion(long diseased_as_diseased, long diseased_as_normal,
                               long normal_as_diseased, long normal_as_normal) {
    if (diseased_as_diseased < 0 || diseased_as_normal < 0 || normal_as_diseased < 0 ||
        normal_as_normal < 0)
        throw std::invalid_argument("confusion counts must be >= 0");
    ConfusionMatrix cm;
    cm.counts[0][0] = diseased_as_diseased;
    cm.counts[0][1] = diseased_as_normal;
    cm.counts[1][0] = normal_as_diseased;
    cm.counts[1][1] = normal_as_normal;
    return cm;
}

std::string percent_string(long numerator, long denominator) {
    if (denominator <= 0) throw std::invalid_argument("percent_string: denominator must be positive");
    // Truncate toward zero at 4 decimals: value = numerator/denominator * 100.
    const long long scaled = static_cast<long long>(numerator) * 1000000LL / denominator;
    const long long whole = scaled / 10000, frac = scaled % 10000;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld.%04lld", whole, frac);
    return buf;
}

LooClassificationResult loo_classify(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                     const TrainClassifier& trainer) {
    const Eigen::Index m = X.rows();
    if (m < 2) throw std::invalid_argument("loo_classify needs at least 2 samples");
    check_binary_labels(labels);

    LooClassificationResult result;
    for (Eigen::Index held = 0; held < m; ++held) {
        Eigen::MatrixXd Xtrain(m - 1, X.cols());
        std::vector<int> ytrain;
        ytrain.reserve(static_cast<size_t>(m - 1));
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i == held) continue;
            Xtrain.row(at++) = X.row(i);
            ytrain.push_back(labels[static_cast<size_t>(i)]);
        }
        const bool both = std::count(ytrain.begin(), ytrain.end(), 1) > 0 &&
                          std::count(ytrain.begin(), ytrain.end(), 0) > 0;
        if (!both) {
            ++result.skipped_folds;
            continue;
        }
        const auto predictor = trainer(Xtrain, ytrain);
        const int predicted = predictor(X.row(held).transpose());
        const int actual = labels[static_cast<size_t>(held)];
        ++result.confusion.counts[actual == 1 ? 0 : 1][predicted == 1 ? 0 : 1];
    }
    return result;
}

double loo_regress(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainRegressor& trainer) {
    const Eigen::Index m = X.rows();
    if (m < 2) throw std::invalid_argument("loo_regress needs at least 2 samples");
    Eigen::VectorXd predictions(m);
    for (Eigen::Index held = 0; held < m; ++held) {
        Eigen::MatrixXd Xtrain(m - 1, X.cols());
        Eigen::VectorXd ytrain(m - 1);
        Eigen::Index at = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i == held) continue;
            Xtrain.row(at) = X.row(i);
            ytrain[at++] = y[i];
        }
        predictions[held] = trainer(Xtrain, ytrain)(X.row(held).transpose());
    }
    return pearson_correlation(predictions, y);
}

}  // namespace lvm
