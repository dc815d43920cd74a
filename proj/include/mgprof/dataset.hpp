#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace mgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One view of one subject: an n x n symmetric, nonnegative weight matrix
/// with zero diagonal. The struct itself does not enforce the invariants so
/// that malformed data can be inspected by `validate_multigraph`; use
/// `ConnectivityMatrix::checked` to build a guaranteed-valid instance.
struct ConnectivityMatrix {
    Matrix weights;

    ConnectivityMatrix() = default;
    explicit ConnectivityMatrix(Matrix w) : weights(std::move(w)) {}

    Eigen::Index n() const noexcept { return weights.rows(); }

    /// Validates squareness, nonnegativity and symmetry within `symmetry_tol`,
    /// then symmetrizes exactly as (W + W^T)/2 and zeroes the diagonal.
    /// Throws LoadError.
    static ConnectivityMatrix checked(Matrix w, double symmetry_tol = 1e-8,
                                      const std::string& origin = "matrix");
};

struct BrainMultigraph {
    std::string subject_id;
    std::vector<ConnectivityMatrix> views;

    std::size_t view_count() const noexcept { return views.size(); }
    Eigen::Index node_count() const noexcept { return views.empty() ? 0 : views.front().n(); }
};

struct Population {
    std::string state_label;
    std::vector<std::string> view_names;
    std::vector<BrainMultigraph> subjects;

    std::size_t subject_count() const noexcept { return subjects.size(); }
    std::size_t view_count() const noexcept { return view_names.size(); }
    Eigen::Index node_count() const noexcept {
        return subjects.empty() ? 0 : subjects.front().node_count();
    }
};

struct SyntheticConfig {
    int n = 35;
    int M = 4;
    int S = 100;
    std::vector<int> block_partition{12, 12, 11};
    /// One entry per state; the two generated populations differ only here.
    std::pair<double, double> intra_weight_mean{2.0, 1.2};
    double inter_weight_mean = 0.5;
    double weight_stddev = 0.3;
    std::uint64_t seed = 0;
    std::pair<std::string, std::string> state_labels{"NC", "ASD"};
};

/// Throws ConfigError if any SyntheticConfig invariant is broken.
void check_config(const SyntheticConfig& cfg);

/// Reads a population manifest (JSON) and every matrix it references.
/// Relative matrix paths resolve against the manifest's directory.
Population load_population(const std::filesystem::path& manifest_path);

/// Writes one CSV per subject view next to `manifest_path` and the manifest.
void save_population(const Population& pop, const std::filesystem::path& manifest_path);

struct ValidationVerdict {
    std::vector<std::string> violations;
    bool ok() const noexcept { return violations.empty(); }
};

ValidationVerdict validate_multigraph(const BrainMultigraph& g);

/// Two populations (first/second state) drawn from a block model.
/// Output is a pure function of `cfg`, independent of `threads`.
std::pair<Population, Population> generate_synthetic(const SyntheticConfig& cfg, int threads = 1);

}  // namespace mgp
