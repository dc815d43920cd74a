#pragma once

#include <span>
#include <string>
#include <vector>

#include "mgprof/centrality.hpp"
#include "mgprof/dataset.hpp"

namespace mgp {

/// Evolving representation of one view during cross-diffusion.
struct StatusMatrix {
    Matrix values;
    std::size_t view_index = 0;
    int iteration = 1;
};

/// Subject-level integrated graph: mean of the final status matrices.
struct FusedGraph {
    Matrix weights;
    std::string subject_id;
    int iterations_run = 0;
    /// Sum of floored centrality entries over all views.
    int floored_count = 0;
    /// Views with no edges left (treated as inert, see DiffusionConfig).
    int empty_views = 0;
    bool slow_centrality = false;
};

struct DiffusionConfig {
    int u_star_max = 20;
    /// Stop once no status entry moves by more than this between iterations.
    double convergence_tol = 1e-6;
    CentralityKind centrality = CentralityKind::Eigen;
    /// Rescale each status to the entry sum of its initial matrix every step.
    bool renormalize = true;
    /// When true an all-zero view gets a uniform normalizer and a zero status
    /// instead of aborting the fusion.
    bool allow_empty_views = true;
};

void check_config(const DiffusionConfig& cfg);

/// P = E^{-1} W, then (P + P^T)/2.
StatusMatrix init_status(const ConnectivityMatrix& w, const CentralityDiag& e,
                         std::size_t view_index = 0);

/// One synchronous update of every view:
///   P_m <- E_m * mean_{k != m}(P_k) * E_m, symmetrized.
/// If `target_sums` is non-empty each result is rescaled so its entry sum
/// equals target_sums[m].
std::vector<StatusMatrix> diffusion_step(std::span<const StatusMatrix> statuses,
                                         std::span<const CentralityDiag> normalizers,
                                         std::span<const double> target_sums = {});

FusedGraph fuse_multigraph(const BrainMultigraph& g, const DiffusionConfig& cfg);

}  // namespace mgp
