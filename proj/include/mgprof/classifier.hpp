#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgprof/dataset.hpp"

namespace mgp {

enum class KernelType { Linear, Sigmoid };

const char* to_string(KernelType k) noexcept;
KernelType parse_kernel_type(const std::string& s);

/// K(x, y) = x.y (linear) or tanh(gamma x.y + coef0) (sigmoid). A gamma of
/// 0 means "auto": 1 / (dims * variance of the standardized training data).
struct Kernel {
    KernelType type = KernelType::Sigmoid;
    double gamma = 0.0;
    double coef0 = 0.0;

    double operator()(const Vector& a, const Vector& b) const;
};

struct SvmModel {
    /// gamma resolved to the value used in training.
    Kernel kernel;
    double C = 1.0;
    /// Standardized support vectors, one per row.
    Matrix support_features;
    std::vector<int> support_labels;
    std::vector<double> alphas;
    double bias = 0.0;
    /// Per-feature standardization fitted on the training data.
    Vector feature_mean;
    Vector feature_scale;
    bool converged = true;
    long pair_updates = 0;
};

struct SmoOptions {
    double kkt_tolerance = 1e-3;
    /// 0 -> 10 * n^2
    long max_pair_updates = 0;
};

/// Soft-margin SVM dual solved by SMO with second-order working-set
/// selection. Rows of `features` are samples; labels are +1 / -1.
SvmModel train_svm(const Matrix& features, std::span<const int> labels, const Kernel& kernel,
                   double C, const SmoOptions& opt = {});
SvmModel train_svm(std::span<const double> features, std::span<const int> labels,
                   const Kernel& kernel, double C, const SmoOptions& opt = {});

/// sum_i alpha_i y_i K(x_i, x) + bias for a raw (unstandardized) sample.
double decision_value(const SvmModel& model, const Vector& x);
/// +1 when the decision value is >= 0.
int predict(const SvmModel& model, const Vector& x);
int predict(const SvmModel& model, double x);

double accuracy(const SvmModel& model, const Matrix& features, std::span<const int> labels);

struct CvReport {
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
    std::uint64_t seed = 0;
    bool all_converged = true;
};

/// Fold index per sample: each class is shuffled with `seed` and dealt
/// round-robin, continuing the rotation across classes.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

CvReport cross_validate(const Matrix& features, std::span<const int> labels, int k,
                        const Kernel& kernel, double C, std::uint64_t seed);
CvReport cross_validate(std::span<const double> features, std::span<const int> labels, int k,
                        const Kernel& kernel, double C, std::uint64_t seed);

/// `fold,accuracy` rows followed by a `mean,<value>` summary line.
std::string cv_report_csv(const CvReport& report);

}  // namespace mgp
