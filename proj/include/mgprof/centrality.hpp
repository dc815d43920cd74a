#pragma once

#include <optional>

#include "mgprof/dataset.hpp"

namespace mgp {

enum class CentralityKind { Eigen, Strength };

const char* to_string(CentralityKind kind) noexcept;
CentralityKind parse_centrality_kind(const std::string& s);

/// Positive per-node normalizer used by cross-diffusion.
struct CentralityDiag {
    CentralityKind kind = CentralityKind::Eigen;
    Vector values;
    /// Rayleigh quotient at convergence; eigen kind only.
    std::optional<double> spectral_radius;
    /// Entries raised to the floor 1e-8 * max(values).
    int floored_count = 0;
    int iterations = 0;
    /// Set when successive updates shrank by less than 1% per step at the end
    /// (near-degenerate dominant eigenvalue).
    bool slow_convergence = false;
};

struct PowerIterationOptions {
    double tolerance = 1e-10;
    int max_iterations = 10000;
};

/// Principal eigenvector of `w` (unit norm, nonnegative orientation) by
/// power iteration on the shifted matrix W + cI, c = max_row_sum / 2. The
/// shift leaves eigenvectors unchanged and makes the Perron root strictly
/// dominant even for bipartite graphs, where plain power iteration
/// oscillates between +psi and -psi. Throws DataError on an all-zero
/// matrix and NumericalError on non-convergence.
CentralityDiag eigencentrality(const ConnectivityMatrix& w, const PowerIterationOptions& opt = {});

/// Row sums rescaled to unit Euclidean norm, then floored.
CentralityDiag strength_centrality(const ConnectivityMatrix& w);

CentralityDiag compute_centrality(const ConnectivityMatrix& w, CentralityKind kind);

/// Raises entries below 1e-8 * max to that floor; returns how many changed.
int floor_values(Vector& values);

}  // namespace mgp
