#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lvm {

// Binary labels throughout: 1 = diseased, 0 = normal.

struct LDAModel {
    Eigen::VectorXd class_mean_diseased;
    Eigen::VectorXd class_mean_normal;
    Eigen::VectorXd global_mean;
    Eigen::MatrixXd within_scatter;
    Eigen::MatrixXd between_scatter;
    Eigen::VectorXd projection;  // unit norm
    double ridge = 0.0;          // regularization applied to S_w
};

/// Two-class LDA direction from (S_w + eps I) w = mu_1 - mu_0, ||w|| = 1.
/// eps = 1e-6 * trace(S_w)/d when S_w is singular or m <= d, else 0.
LDAModel lda_fit(const Eigen::MatrixXd& X, const std::vector<int>& labels);
double lda_project(const LDAModel& model, const Eigen::VectorXd& x);

/// Majority vote among the k nearest training scalars (absolute
/// difference); k must be odd and <= training size. Distance ties break
/// toward the lower training index.
int knn_classify(const std::vector<double>& train_scalars, const std::vector<int>& train_labels,
                 double query_scalar, int k);

struct MLPModel {
    Eigen::MatrixXd w1;  // h x d
    Eigen::VectorXd b1;  // h
    Eigen::RowVectorXd w2;  // 1 x h
    double b2 = 0.0;
    double learning_rate = 0.3;
    int epochs_run = 0;
    std::uint64_t seed = 0;
};

/// Full-batch gradient descent on mean squared error; logistic activation
/// on hidden and output layers; weights initialized uniform [-0.5, 0.5]
/// from the seed. Throws when the loss turns non-finite, naming the epoch.
MLPModel mlp_train(const Eigen::MatrixXd& X, const std::vector<int>& labels, int hidden, int epochs,
                   double learning_rate = 0.3, std::uint64_t seed = 0);
double mlp_predict_probability(const MLPModel& model, const Eigen::VectorXd& x);
int mlp_predict(const MLPModel& model, const Eigen::VectorXd& x);  // diseased iff p >= 0.5

/// MSE loss and analytic gradient over all parameters, flattened in
/// (w1, b1, w2, b2) order; the finite-difference tests drive this.
double mlp_loss(const MLPModel& model, const Eigen::MatrixXd& X, const std::vector<int>& labels);
Eigen::VectorXd mlp_gradient(const MLPModel& model, const Eigen::MatrixXd& X,
                             const std::vector<int>& labels);
Eigen::VectorXd mlp_parameters(const MLPModel& model);
void mlp_set_parameters(MLPModel& model, const Eigen::VectorXd& theta);

struct RegressionModel {
    Eigen::VectorXd coefficients;  // beta_0 .. beta_n
    double training_mse = 0.0;
    bool rank_deficient = false;   // minimum-norm solution returned
};

/// Least squares with intercept via a rank-revealing orthogonal
/// factorization; minimum-norm solution when rank-deficient or m <= n+1.
RegressionModel mvr_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge = 0.0);
double mvr_predict(const RegressionModel& model, const Eigen::VectorXd& x);

double pearson_correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Diseased iff percent DS >= 70; input must lie in [0, 100].
int binarize_ds(double percent_ds);
inline constexpr double kDsThreshold = 70.0;

struct ConfusionMatrix {
    // counts[actual][predicted], index 0 = diseased, 1 = normal
    long counts[2][2] = {{0, 0}, {0, 0}};

    long total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
    double accuracy() const;
    double false_alarm_rate() const;  // normal classified diseased
    double miss_rate() const;         // diseased classified normal
};

ConfusionMatrix make_confusion(long diseased_as_diseased, long diseased_as_normal,
                               long normal_as_diseased, long normal_as_normal);

/// Percentage formatted with 4 decimals, truncated toward zero so exact
/// rational counts print their leading digits (29/32 -> "90.6250").
std::string percent_string(long numerator, long denominator);

struct LooClassificationResult {
    ConfusionMatrix confusion;
    int skipped_folds = 0;  // training fold lost one of the classes
};

/// Leave-one-out: the trainer sees the m-1 remaining rows and returns a
/// predictor for the held-out row. The trainer must retrain every
/// downstream stage (standardization, vocabulary, classifier).
using TrainClassifier = std::function<std::function<int(const Eigen::VectorXd&)>(
    const Eigen::MatrixXd&, const std::vector<int>&)>;
LooClassificationResult loo_classify(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                     const TrainClassifier& trainer);

using TrainRegressor = std::function<std::function<double(const Eigen::VectorXd&)>(
    const Eigen::MatrixXd&, const Eigen::VectorXd&)>;
/// Returns the Pearson correlation between held-out predictions and truth.
double loo_regress(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TrainRegressor& trainer);

}  // namespace lvm
