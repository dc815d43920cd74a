#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mgprof/dataset.hpp"
#include "mgprof/diffusion.hpp"

namespace mgp {

/// I - S^{-1/2} P S^{-1/2} with S the strength diagonal. Nodes with zero
/// strength get an all-zero row and column (eigenvalue 0, own component).
struct NormalizedLaplacian {
    Matrix values;
    std::vector<Eigen::Index> isolated_nodes;
};

struct Spectrum {
    /// Ascending.
    Vector eigenvalues;
    /// Orthonormal columns matching `eigenvalues`, when requested.
    std::optional<Matrix> eigenvectors;
};

struct Timescales {
    std::vector<double> values;
    bool operator==(const Timescales&) const = default;
};

enum class ProfileScale { Trace, Mean };

const char* to_string(ProfileScale s) noexcept;
ProfileScale parse_profile_scale(const std::string& s);

struct HeatTraceProfile {
    std::string subject_id;
    Timescales timescales;
    std::vector<double> values;
};

NormalizedLaplacian normalized_laplacian(const Matrix& p);
inline NormalizedLaplacian normalized_laplacian(const FusedGraph& p) {
    return normalized_laplacian(p.weights);
}

/// Dense symmetric eigendecomposition. Eigenvalues within 1e-8 outside
/// [0, 2] are clamped onto the interval.
Spectrum symmetric_spectrum(const NormalizedLaplacian& l, bool want_vectors = false);

/// n_t points log-uniformly spaced in [t_min, t_max].
Timescales make_timescales(double t_min = 1e-2, double t_max = 1e3, int n_t = 250);

/// sum_k exp(-t * lambda_k)
double heat_trace(const Spectrum& spec, double t);

/// Diagonal entry v of the heat kernel: sum_k exp(-t * lambda_k) phi_k(v)^2.
double node_heat_trace(const Spectrum& spec, double t, Eigen::Index v);

/// One Laplacian and one eigendecomposition, then h(t) for each t. With
/// ProfileScale::Mean the trace is divided by the node count.
HeatTraceProfile profile_subject(const FusedGraph& fused, const Timescales& ts,
                                 ProfileScale scale = ProfileScale::Trace);

/// CSV with header `subject_id,t,h`, rows grouped by subject in order.
void write_profiles_csv(const std::vector<HeatTraceProfile>& profiles,
                        const std::filesystem::path& path);
std::vector<HeatTraceProfile> read_profiles_csv(const std::filesystem::path& path);

}  // namespace mgp
