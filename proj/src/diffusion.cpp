#include "mgprof/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgprof/errors.hpp"

namespace mgp {

void check_config(const DiffusionConfig& cfg) {
    if (cfg.u_star_max < 1) throw ConfigError("diffusion", "u_star_max must be >= 1");
    if (!(cfg.convergence_tol > 0.0)) throw ConfigError("diffusion", "convergence_tol must be > 0");
}

StatusMatrix init_status(const ConnectivityMatrix& w, const CentralityDiag& e,
                         std::size_t view_index) {
    if (e.values.size() != w.n()) throw ConfigError("diffusion", "normalizer size mismatch");
    if ((e.values.array() <= 0.0).any()) {
        throw ConfigError("diffusion", "normalizer entries must be positive");
    }
    const Matrix p = e.values.cwiseInverse().asDiagonal() * w.weights;
    return {(p + p.transpose()) * 0.5, view_index, 1};
}

std::vector<StatusMatrix> diffusion_step(std::span<const StatusMatrix> statuses,
                                         std::span<const CentralityDiag> normalizers,
                                         std::span<const double> target_sums) {
    const std::size_t views = statuses.size();
    if (views < 2) throw ConfigError("diffusion", "cross-diffusion needs M >= 2 views");
    if (normalizers.size() != views) throw ConfigError("diffusion", "one normalizer per view");
    if (!target_sums.empty() && target_sums.size() != views) {
        throw ConfigError("diffusion", "one target sum per view");
    }
    const Eigen::Index n = statuses.front().values.rows();
    for (std::size_t m = 0; m < views; ++m) {
        if (statuses[m].values.rows() != n || statuses[m].values.cols() != n ||
            normalizers[m].values.size() != n) {
            throw ConfigError("diffusion", "inconsistent node count across views");
        }
    }

    std::vector<StatusMatrix> next(views);
    for (std::size_t m = 0; m < views; ++m) {
        Matrix others = Matrix::Zero(n, n);
        for (std::size_t k = 0; k < views; ++k)
            if (k != m) others += statuses[k].values;
        others /= static_cast<double>(views - 1);
        const auto e = normalizers[m].values.asDiagonal();
        Matrix p = e * others * e;
        p = (p + p.transpose()) * 0.5;
        if (!target_sums.empty()) {
            const double current = p.sum();
            if (target_sums[m] == 0.0) {
                p.setZero();
            } else if (current != 0.0) {
                p *= target_sums[m] / current;
            }
        }
        if (!p.allFinite()) throw NumericalError("diffusion", "non-finite status matrix");
        next[m] = {std::move(p), statuses[m].view_index, statuses[m].iteration + 1};
    }
    return next;
}

namespace {

bool lexicographically_less(const Matrix& a, const Matrix& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

FusedGraph fuse_multigraph(const BrainMultigraph& g, const DiffusionConfig& cfg) {
    check_config(cfg);
    const std::size_t views = g.views.size();
    if (views < 2) throw ConfigError("diffusion", g.subject_id + ": cross-diffusion needs M >= 2");
    const Eigen::Index n = g.node_count();

    // Process views in a content-defined order so that the floating-point
    // result does not depend on how the views were listed.
    std::vector<std::size_t> order(views);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lexicographically_less(g.views[a].weights, g.views[b].weights);
    });

    FusedGraph fused;
    fused.subject_id = g.subject_id;

    std::vector<CentralityDiag> normalizers;
    std::vector<StatusMatrix> statuses;
    std::vector<double> target_sums;
    for (std::size_t m : order) {
        const ConnectivityMatrix& w = g.views[m];
        if (w.n() != n) throw DataError("diffusion", g.subject_id + ": inconsistent node count");
        CentralityDiag e;
        if (cfg.allow_empty_views && !(w.weights.array() != 0.0).any()) {
            e.kind = cfg.centrality;
            e.values = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
            ++fused.empty_views;
        } else {
            e = compute_centrality(w, cfg.centrality);
        }
        fused.floored_count += e.floored_count;
        fused.slow_centrality = fused.slow_centrality || e.slow_convergence;
        statuses.push_back(init_status(w, e, m));
        target_sums.push_back(statuses.back().values.sum());
        normalizers.push_back(std::move(e));
    }

    const std::span<const double> targets =
        cfg.renormalize ? std::span<const double>(target_sums) : std::span<const double>();
    for (int u = 1; u <= cfg.u_star_max; ++u) {
        auto next = diffusion_step(statuses, normalizers, targets);
        double change = 0.0;
        for (std::size_t m = 0; m < views; ++m) {
            change = std::max(change, (next[m].values - statuses[m].values).cwiseAbs().maxCoeff());
        }
        statuses = std::move(next);
        fused.iterations_run = u;
        if (change < cfg.convergence_tol) break;
    }

    Matrix sum = Matrix::Zero(n, n);
    for (const auto& s : statuses) sum += s.values;
    fused.weights = (sum / static_cast<double>(views)).cwiseMax(0.0);
    fused.weights.diagonal().setZero();
    return fused;
}

}  // namespace mgp
