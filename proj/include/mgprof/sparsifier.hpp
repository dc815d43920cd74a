#pragma once

#include <span>
#include <vector>

#include "mgprof/dataset.hpp"

namespace mgp {

enum class StddevMode { Population, Sample };

/// Pooled statistics of the strictly-upper-triangular weights of one view
/// across every subject of a population. Zero entries are included.
struct ViewStatistics {
    std::size_t view_index = 0;
    double mu = 0.0;
    double sigma = 0.0;
};

/// Thresholds rho = mu_m + alpha_j * sigma_m for every view m and alpha j.
struct SparsificationGrid {
    std::vector<double> alphas;
    std::vector<ViewStatistics> stats;
    /// thresholds[m][j]
    std::vector<std::vector<double>> thresholds;
};

ViewStatistics view_statistics(const Population& pop, std::size_t m,
                               StddevMode mode = StddevMode::Population);

/// Alphas must be strictly increasing and finite.
SparsificationGrid make_grid(const Population& pop, std::span<const double> alphas,
                             StddevMode mode = StddevMode::Population);

/// Keeps entries with weight > rho (strict); everything else becomes 0.
ConnectivityMatrix sparsify_matrix(const ConnectivityMatrix& w, double rho);

/// Thresholds each view at its own rho computed from `pop`'s statistics.
Population sparsify_population(const Population& pop, double alpha,
                               StddevMode mode = StddevMode::Population);

/// Same as above with precomputed statistics (one per view).
Population sparsify_population(const Population& pop, double alpha,
                               std::span<const ViewStatistics> stats);

}  // namespace mgp
