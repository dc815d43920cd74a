#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mgprof/classifier.hpp"
#include "mgprof/dataset.hpp"
#include "mgprof/diffusion.hpp"
#include "mgprof/profiler.hpp"
#include "mgprof/sparsifier.hpp"
#include "mgprof/spectral.hpp"

namespace mgp {

enum class FeatureMode { Tail, Full };

const char* to_string(FeatureMode f) noexcept;
FeatureMode parse_feature_mode(const std::string& s);
const char* to_string(StddevMode m) noexcept;
StddevMode parse_stddev_mode(const std::string& s);

struct TimescaleSettings {
    double t_min = 1e-2;
    double t_max = 1e3;
    int n_t = 250;
    ProfileScale scale = ProfileScale::Trace;
};

struct ClassifierSettings {
    Kernel kernel;
    double C = 1.0;
    int folds = 5;
    std::uint64_t cv_seed = 0;
    FeatureMode feature = FeatureMode::Tail;
    std::optional<int> tail_index;
};

struct ExperimentConfig {
    /// Either a synthetic generator config or two population manifests.
    std::optional<SyntheticConfig> synthetic;
    std::vector<std::filesystem::path> manifests;

    std::vector<double> alphas{1.0, 1.4, 1.8, 2.2, 2.6, 3.0};
    StddevMode stddev_mode = StddevMode::Population;
    /// `centrality` is ignored here; every kind in `kinds` is run.
    DiffusionConfig diffusion;
    std::vector<CentralityKind> kinds{CentralityKind::Eigen, CentralityKind::Strength};
    TimescaleSettings timescales;
    ClassifierSettings classifier;
    int poly_degree = 5;
    int threads = 1;
    std::filesystem::path output_dir;
};

/// Throws ConfigError on an invalid configuration.
void check_config(const ExperimentConfig& cfg);

/// Outcome of one (alpha, centrality kind) pair.
struct ExperimentRecord {
    double alpha = 0.0;
    CentralityKind kind = CentralityKind::Eigen;
    MarginReport margin;
    CvReport cv;
    std::vector<double> mean_s1;
    std::vector<double> mean_s2;
    std::vector<int> iterations_s1;
    std::vector<int> iterations_s2;
    int floored_total = 0;
    int empty_views_total = 0;
};

struct ExperimentReport {
    std::string state_s1;
    std::string state_s2;
    Timescales timescales;
    std::vector<ExperimentRecord> records;
    /// Ascending-power coefficients per centrality kind name; absent when the
    /// fit was skipped.
    std::map<std::string, std::vector<double>> fits;
    std::vector<std::string> warnings;
    std::optional<std::uint64_t> data_seed;
    std::uint64_t cv_seed = 0;
};

/// Loads or generates both populations and evaluates every (alpha, kind).
/// When cfg.output_dir is set, writes report.json and the plot data there.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Same, on populations already in memory.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const Population& s1,
                                const Population& s2);

/// Writes curve / margin / fit CSVs and SVG renderings; returns the paths.
std::vector<std::filesystem::path> emit_plot_data(const ExperimentReport& report,
                                                  const std::filesystem::path& out_dir);

// JSON (de)serialization of configs and reports.
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport experiment_report_from_json(const nlohmann::json& j);

}  // namespace mgp
