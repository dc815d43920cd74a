#include "mgprof/sparsifier.hpp"

#include <cmath>
#include <string>

#include "mgprof/errors.hpp"

namespace mgp {

ViewStatistics view_statistics(const Population& pop, std::size_t m, StddevMode mode) {
    if (pop.subjects.empty()) throw DataError("sparsifier", "empty population");
    if (m >= pop.subjects.front().views.size()) {
        throw ConfigError("sparsifier", "view index " + std::to_string(m) + " out of range");
    }
    // Two passes over the pool: mean, then centered sum of squares.
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& g : pop.subjects) {
        const Matrix& w = g.views.at(m).weights;
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
                sum += w(i, j);
                ++count;
            }
    }
    if (count == 0) throw DataError("sparsifier", "view has no off-diagonal entries");
    const double mu = sum / static_cast<double>(count);
    double ss = 0.0;
    for (const auto& g : pop.subjects) {
        const Matrix& w = g.views[m].weights;
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
                const double d = w(i, j) - mu;
                ss += d * d;
            }
    }
    double denom = static_cast<double>(count);
    if (mode == StddevMode::Sample) {
        if (count < 2) throw DataError("sparsifier", "sample stddev needs at least 2 values");
        denom -= 1.0;
    }
    return {m, mu, std::sqrt(ss / denom)};
}

SparsificationGrid make_grid(const Population& pop, std::span<const double> alphas,
                             StddevMode mode) {
    if (alphas.empty()) throw ConfigError("sparsifier", "no alpha values");
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        if (!std::isfinite(alphas[j])) throw ConfigError("sparsifier", "alpha must be finite");
        if (j > 0 && !(alphas[j] > alphas[j - 1])) {
            throw ConfigError("sparsifier", "alphas must be strictly increasing");
        }
    }
    SparsificationGrid grid;
    grid.alphas.assign(alphas.begin(), alphas.end());
    for (std::size_t m = 0; m < pop.view_count(); ++m) {
        const ViewStatistics st = view_statistics(pop, m, mode);
        std::vector<double> row;
        for (double a : alphas) row.push_back(st.mu + a * st.sigma);
        grid.stats.push_back(st);
        grid.thresholds.push_back(std::move(row));
    }
    return grid;
}

ConnectivityMatrix sparsify_matrix(const ConnectivityMatrix& w, double rho) {
    Matrix out = (w.weights.array() > rho).select(w.weights, 0.0);
    out.diagonal().setZero();
    return ConnectivityMatrix(std::move(out));
}

Population sparsify_population(const Population& pop, double alpha,
                               std::span<const ViewStatistics> stats) {
    if (!std::isfinite(alpha)) throw ConfigError("sparsifier", "alpha must be finite");
    if (stats.size() != pop.view_count()) {
        throw ConfigError("sparsifier", "statistics do not match view count");
    }
    Population out;
    out.state_label = pop.state_label;
    out.view_names = pop.view_names;
    out.subjects.reserve(pop.subjects.size());
    for (const auto& g : pop.subjects) {
        BrainMultigraph sg;
        sg.subject_id = g.subject_id;
        for (std::size_t m = 0; m < g.views.size(); ++m) {
            sg.views.push_back(sparsify_matrix(g.views[m], stats[m].mu + alpha * stats[m].sigma));
        }
        out.subjects.push_back(std::move(sg));
    }
    return out;
}

Population sparsify_population(const Population& pop, double alpha, StddevMode mode) {
    if (pop.subjects.empty()) throw DataError("sparsifier", "empty population");
    std::vector<ViewStatistics> stats;
    for (std::size_t m = 0; m < pop.view_count(); ++m) stats.push_back(view_statistics(pop, m, mode));
    return sparsify_population(pop, alpha, stats);
}

}  // namespace mgp
