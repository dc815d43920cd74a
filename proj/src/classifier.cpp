#include "mgprof/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mgprof/errors.hpp"
#include "mgprof/io.hpp"

namespace mgp {

const char* to_string(KernelType k) noexcept { return k == KernelType::Linear ? "linear" : "sigmoid"; }

KernelType parse_kernel_type(const std::string& s) {
    if (s == "linear") return KernelType::Linear;
    if (s == "sigmoid") return KernelType::Sigmoid;
    throw ConfigError("classifier", "unknown kernel '" + s + "'");
}

double Kernel::operator()(const Vector& a, const Vector& b) const {
    const double dot = a.dot(b);
    return type == KernelType::Linear ? dot : std::tanh(gamma * dot + coef0);
}

namespace {

constexpr double kTau = 1e-12;

Matrix column(std::span<const double> xs) {
    Matrix m(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = xs[i];
    return m;
}

void check_labels(std::span<const int> labels, Eigen::Index rows) {
    if (static_cast<Eigen::Index>(labels.size()) != rows) {
        throw ConfigError("classifier", "feature and label counts differ");
    }
    bool pos = false, neg = false;
    for (int y : labels) {
        if (y == 1) pos = true;
        else if (y == -1) neg = true;
        else throw ConfigError("classifier", "labels must be +1 or -1");
    }
    if (!pos || !neg) throw DataError("classifier", "training data has a single class");
}

// libsvm-style dual solver: min 1/2 a^T Q a - e^T a, 0 <= a <= C, y^T a = 0.
struct Smo {
    const Matrix& K;
    std::span<const int> y;
    double C;
    std::vector<double> alpha;
    std::vector<double> grad;

    Smo(const Matrix& kernel, std::span<const int> labels, double c)
        : K(kernel), y(labels), C(c), alpha(labels.size(), 0.0), grad(labels.size(), -1.0) {}

    bool upper(std::size_t t) const { return alpha[t] >= C; }
    bool lower(std::size_t t) const { return alpha[t] <= 0.0; }
    bool in_up(std::size_t t) const { return y[t] == 1 ? !upper(t) : !lower(t); }
    bool in_low(std::size_t t) const { return y[t] == 1 ? !lower(t) : !upper(t); }
    double q(std::size_t a, std::size_t b) const {
        return y[a] * y[b] * K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
    double kd(std::size_t a) const {
        return K(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
    }

    // Returns false when the KKT gap is below tolerance.
    bool select(double eps, std::size_t& out_i, std::size_t& out_j) const {
        const std::size_t n = alpha.size();
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * grad[t] >= gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double yg = y[t] * grad[t];
            gmax2 = std::max(gmax2, yg);
            if (i == n) continue;
            const double b = gmax + yg;
            if (b > 0.0) {
                double a = kd(i) + kd(t) - 2.0 * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
                if (a <= 0.0) a = kTau;
                const double obj = -(b * b) / a;
                if (obj <= best) {
                    best = obj;
                    j = t;
                }
            }
        }
        if (i == n || j == n || gmax + gmax2 < eps) return false;
        out_i = i;
        out_j = j;
        return true;
    }

    void update(std::size_t i, std::size_t j) {
        const double old_i = alpha[i], old_j = alpha[j];
        double& ai = alpha[i];
        double& aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = kd(i) + kd(j) + 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) { aj = 0.0; ai = diff; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = -diff; }
            }
            if (diff > 0.0) {
                if (ai > C) { ai = C; aj = C - diff; }
            } else {
                if (aj > C) { aj = C; ai = C + diff; }
            }
        } else {
            double quad = kd(i) + kd(j) - 2.0 * q(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > C) {
                if (ai > C) { ai = C; aj = sum - C; }
            } else {
                if (aj < 0.0) { aj = 0.0; ai = sum; }
            }
            if (sum > C) {
                if (aj > C) { aj = C; ai = sum - C; }
            } else {
                if (ai < 0.0) { ai = 0.0; aj = sum; }
            }
        }
        const double di = ai - old_i, dj = aj - old_j;
        for (std::size_t k = 0; k < alpha.size(); ++k) grad[k] += q(i, k) * di + q(j, k) * dj;
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        int free = 0;
        for (std::size_t t = 0; t < alpha.size(); ++t) {
            const double yg = y[t] * grad[t];
            if (upper(t)) {
                if (y[t] == -1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (lower(t)) {
                if (y[t] == 1) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++free;
                sum_free += yg;
            }
        }
        return free > 0 ? sum_free / free : (ub + lb) / 2.0;
    }
};

}  // namespace

SvmModel train_svm(const Matrix& features, std::span<const int> labels, const Kernel& kernel,
                   double C, const SmoOptions& opt) {
    if (!(C > 0.0)) throw ConfigError("classifier", "C must be > 0");
    check_labels(labels, features.rows());
    const Eigen::Index n = features.rows();
    const Eigen::Index d = features.cols();
    if (d == 0) throw ConfigError("classifier", "no features");

    SvmModel model;
    model.C = C;
    model.feature_mean = features.colwise().mean().transpose();
    model.feature_scale.resize(d);
    for (Eigen::Index c = 0; c < d; ++c) {
        const double var =
            (features.col(c).array() - model.feature_mean[c]).square().sum() / static_cast<double>(n);
        model.feature_scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    const Matrix z = (features.rowwise() - model.feature_mean.transpose()) *
                     model.feature_scale.cwiseInverse().asDiagonal();

    model.kernel = kernel;
    if (kernel.type == KernelType::Sigmoid && kernel.gamma == 0.0) {
        const double var = (z.array() - z.mean()).square().mean();
        model.kernel.gamma = var > 0.0 ? 1.0 / (static_cast<double>(d) * var) : 1.0;
    }

    Matrix gram(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a; b < n; ++b) {
            const double v = model.kernel(z.row(a).transpose(), z.row(b).transpose());
            gram(a, b) = v;
            gram(b, a) = v;
        }

    Smo smo(gram, labels, C);
    const long cap = opt.max_pair_updates > 0 ? opt.max_pair_updates : 10L * n * n;
    model.converged = false;
    std::size_t i = 0, j = 0;
    while (model.pair_updates < cap) {
        if (!smo.select(opt.kkt_tolerance, i, j)) {
            model.converged = true;
            break;
        }
        smo.update(i, j);
        ++model.pair_updates;
    }
    if (!model.converged && !smo.select(opt.kkt_tolerance, i, j)) model.converged = true;
    model.bias = -smo.rho();

    std::vector<Eigen::Index> support;
    for (Eigen::Index t = 0; t < n; ++t)
        if (smo.alpha[static_cast<std::size_t>(t)] > 0.0) support.push_back(t);
    model.support_features.resize(static_cast<Eigen::Index>(support.size()), d);
    for (std::size_t s = 0; s < support.size(); ++s) {
        model.support_features.row(static_cast<Eigen::Index>(s)) = z.row(support[s]);
        model.support_labels.push_back(labels[static_cast<std::size_t>(support[s])]);
        model.alphas.push_back(smo.alpha[static_cast<std::size_t>(support[s])]);
    }
    return model;
}

SvmModel train_svm(std::span<const double> features, std::span<const int> labels,
                   const Kernel& kernel, double C, const SmoOptions& opt) {
    return train_svm(column(features), labels, kernel, C, opt);
}

double decision_value(const SvmModel& model, const Vector& x) {
    if (x.size() != model.feature_mean.size()) throw ConfigError("classifier", "feature size mismatch");
    const Vector z = (x - model.feature_mean).cwiseQuotient(model.feature_scale);
    double f = model.bias;
    for (std::size_t s = 0; s < model.alphas.size(); ++s) {
        f += model.alphas[s] * model.support_labels[s] *
             model.kernel(model.support_features.row(static_cast<Eigen::Index>(s)).transpose(), z);
    }
    return f;
}

int predict(const SvmModel& model, const Vector& x) { return decision_value(model, x) >= 0.0 ? 1 : -1; }

int predict(const SvmModel& model, double x) { return predict(model, Vector::Constant(1, x)); }

double accuracy(const SvmModel& model, const Matrix& features, std::span<const int> labels) {
    if (features.rows() == 0) return 0.0;
    int correct = 0;
    for (Eigen::Index r = 0; r < features.rows(); ++r)
        if (predict(model, features.row(r).transpose()) == labels[static_cast<std::size_t>(r)]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(features.rows());
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("classifier", "need at least 2 folds");
    std::vector<int> fold(labels.size(), -1);
    std::mt19937_64 rng(seed);
    int offset = 0;
    for (int cls : {-1, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == cls) members.push_back(i);
        if (static_cast<int>(members.size()) < k) {
            throw DataError("classifier", "class " + std::to_string(cls) + " has " +
                                              std::to_string(members.size()) + " members, fewer than " +
                                              std::to_string(k) + " folds");
        }
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t p = 0; p < members.size(); ++p)
            fold[members[p]] = static_cast<int>((offset + p) % static_cast<std::size_t>(k));
        offset = static_cast<int>((offset + members.size()) % static_cast<std::size_t>(k));
    }
    for (int f : fold)
        if (f < 0) throw ConfigError("classifier", "labels must be +1 or -1");
    return fold;
}

CvReport cross_validate(const Matrix& features, std::span<const int> labels, int k,
                        const Kernel& kernel, double C, std::uint64_t seed) {
    if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
        throw ConfigError("classifier", "feature and label counts differ");
    }
    const std::vector<int> fold = stratified_folds(labels, k, seed);
    CvReport report;
    report.seed = seed;
    for (int f = 0; f < k; ++f) {
        std::vector<Eigen::Index> train_idx, test_idx;
        for (std::size_t i = 0; i < fold.size(); ++i)
            (fold[i] == f ? test_idx : train_idx).push_back(static_cast<Eigen::Index>(i));
        const Matrix train_x = features(train_idx, Eigen::all);
        const Matrix test_x = features(test_idx, Eigen::all);
        std::vector<int> train_y, test_y;
        for (auto i : train_idx) train_y.push_back(labels[static_cast<std::size_t>(i)]);
        for (auto i : test_idx) test_y.push_back(labels[static_cast<std::size_t>(i)]);
        const SvmModel model = train_svm(train_x, train_y, kernel, C);
        report.all_converged = report.all_converged && model.converged;
        report.fold_accuracies.push_back(accuracy(model, test_x, test_y));
    }
    double sum = 0.0;
    for (double a : report.fold_accuracies) sum += a;
    report.mean_accuracy = sum / static_cast<double>(k);
    return report;
}

CvReport cross_validate(std::span<const double> features, std::span<const int> labels, int k,
                        const Kernel& kernel, double C, std::uint64_t seed) {
    return cross_validate(column(features), labels, k, kernel, C, seed);
}

std::string cv_report_csv(const CvReport& report) {
    std::string out = "fold,accuracy\n";
    for (std::size_t f = 0; f < report.fold_accuracies.size(); ++f)
        out += std::to_string(f + 1) + ',' + io::format_double(report.fold_accuracies[f]) + '\n';
    out += "mean," + io::format_double(report.mean_accuracy) + '\n';
    return out;
}

}  // namespace mgp
