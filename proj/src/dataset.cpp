#include "mgprof/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "mgprof/errors.hpp"
#include "mgprof/io.hpp"
#include "mgprof/parallel.hpp"

namespace mgp {

const char* to_string(LoadErrorKind kind) noexcept {
    switch (kind) {
        case LoadErrorKind::MissingFile: return "missing file";
        case LoadErrorKind::ParseError: return "parse error";
        case LoadErrorKind::NonSquare: return "non-square matrix";
        case LoadErrorKind::SymmetryViolation: return "symmetry violation";
        case LoadErrorKind::NegativeEntry: return "negative entry";
        case LoadErrorKind::InconsistentNodeCount: return "inconsistent node count";
        case LoadErrorKind::InconsistentViewCount: return "inconsistent view count";
        case LoadErrorKind::TooFewViews: return "too few views";
    }
    return "unknown";
}

ConnectivityMatrix ConnectivityMatrix::checked(Matrix w, double symmetry_tol,
                                               const std::string& origin) {
    if (w.rows() != w.cols()) {
        throw LoadError(LoadErrorKind::NonSquare, origin + " is " + std::to_string(w.rows()) +
                                                      "x" + std::to_string(w.cols()));
    }
    if (!w.allFinite()) throw LoadError(LoadErrorKind::ParseError, origin + " has non-finite values");
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (w(i, j) < 0.0) {
                throw LoadError(LoadErrorKind::NegativeEntry,
                                origin + " (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (j > i && std::abs(w(i, j) - w(j, i)) > symmetry_tol) {
                throw LoadError(LoadErrorKind::SymmetryViolation,
                                origin + " (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    Matrix sym = (w + w.transpose()) * 0.5;
    sym.diagonal().setZero();
    return ConnectivityMatrix(std::move(sym));
}

void check_config(const SyntheticConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ConfigError("dataset", msg); };
    if (cfg.n < 2) fail("n must be >= 2");
    if (cfg.M < 2) fail("M must be >= 2");
    if (cfg.S < 1) fail("S must be >= 1");
    if (cfg.block_partition.empty()) fail("block_partition must not be empty");
    int total = 0;
    for (int b : cfg.block_partition) {
        if (b <= 0) fail("block sizes must be positive");
        total += b;
    }
    if (total != cfg.n) fail("block_partition must sum to n");
    if (!(cfg.intra_weight_mean.first > 0.0) || !(cfg.intra_weight_mean.second > 0.0) ||
        !(cfg.inter_weight_mean > 0.0)) {
        fail("weight means must be > 0");
    }
    if (!(cfg.weight_stddev >= 0.0) || !std::isfinite(cfg.weight_stddev)) {
        fail("weight_stddev must be >= 0");
    }
}

// ---------------------------------------------------------------------------
// Manifest I/O

namespace {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
    const std::string text = io::read_text(path);
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw LoadError(LoadErrorKind::ParseError, path.string() + ": " + e.what());
    }
}

}  // namespace

Population load_population(const std::filesystem::path& manifest_path) {
    const json doc = parse_json_file(manifest_path);
    const auto base = manifest_path.parent_path();
    Population pop;
    try {
        pop.state_label = doc.at("state_label").get<std::string>();
        pop.view_names = doc.at("view_names").get<std::vector<std::string>>();
        const auto& subjects = doc.at("subjects");
        if (!subjects.is_array() || subjects.empty()) {
            throw LoadError(LoadErrorKind::ParseError, manifest_path.string() + ": no subjects");
        }
        const std::size_t m_expected = pop.view_names.size();
        if (m_expected < 2) {
            throw LoadError(LoadErrorKind::TooFewViews, manifest_path.string() + ": M=" +
                                                            std::to_string(m_expected));
        }
        Eigen::Index n_expected = -1;
        for (const auto& entry : subjects) {
            BrainMultigraph g;
            g.subject_id = entry.at("id").get<std::string>();
            const auto paths = entry.at("views").get<std::vector<std::string>>();
            if (paths.size() != m_expected) {
                throw LoadError(LoadErrorKind::InconsistentViewCount,
                                g.subject_id + " has " + std::to_string(paths.size()) +
                                    " views, expected " + std::to_string(m_expected));
            }
            for (const auto& p : paths) {
                std::filesystem::path file(p);
                if (file.is_relative()) file = base / file;
                if (!std::filesystem::exists(file)) {
                    throw LoadError(LoadErrorKind::MissingFile, file.string());
                }
                auto view = ConnectivityMatrix::checked(io::read_matrix_csv(file), 1e-8, file.string());
                if (n_expected < 0) n_expected = view.n();
                if (view.n() != n_expected) {
                    throw LoadError(LoadErrorKind::InconsistentNodeCount,
                                    file.string() + " has n=" + std::to_string(view.n()) +
                                        ", expected " + std::to_string(n_expected));
                }
                g.views.push_back(std::move(view));
            }
            pop.subjects.push_back(std::move(g));
        }
    } catch (const json::exception& e) {
        throw LoadError(LoadErrorKind::ParseError, manifest_path.string() + ": " + e.what());
    }
    return pop;
}

void save_population(const Population& pop, const std::filesystem::path& manifest_path) {
    const auto base = manifest_path.parent_path();
    json doc;
    doc["state_label"] = pop.state_label;
    doc["view_names"] = pop.view_names;
    doc["subjects"] = json::array();
    for (const auto& g : pop.subjects) {
        json entry;
        entry["id"] = g.subject_id;
        entry["views"] = json::array();
        for (std::size_t m = 0; m < g.views.size(); ++m) {
            const std::string view_name =
                m < pop.view_names.size() ? pop.view_names[m] : "view" + std::to_string(m);
            const std::string file = g.subject_id + "_" + view_name + ".csv";
            io::write_matrix_csv(g.views[m].weights, base / file);
            entry["views"].push_back(file);
        }
        doc["subjects"].push_back(std::move(entry));
    }
    io::write_text(manifest_path, doc.dump(2) + "\n");
}

ValidationVerdict validate_multigraph(const BrainMultigraph& g) {
    ValidationVerdict verdict;
    auto add = [&](std::string v) { verdict.violations.push_back(std::move(v)); };
    if (g.views.size() < 2) add("M >= 2");
    const Eigen::Index n = g.node_count();
    for (std::size_t m = 0; m < g.views.size(); ++m) {
        const Matrix& w = g.views[m].weights;
        const std::string tag = "view " + std::to_string(m) + ": ";
        if (w.rows() != w.cols()) {
            add(tag + "non-square");
            continue;
        }
        if (w.rows() != n) add(tag + "node count mismatch");
        if (!w.allFinite()) add(tag + "non-finite entry");
        if ((w.array() < 0.0).any()) add(tag + "negative entry");
        if ((w.diagonal().array() != 0.0).any()) add(tag + "nonzero diagonal");
        if (w != w.transpose()) add(tag + "asymmetric");
    }
    return verdict;
}

// ---------------------------------------------------------------------------
// Synthetic generation

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t state, std::uint64_t subject,
                          std::uint64_t view) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ state);
    h = splitmix64(h ^ subject);
    return splitmix64(h ^ view);
}

Matrix sample_view(const std::vector<int>& block_of, double intra_mean, double inter_mean,
                   double stddev, std::uint64_t seed) {
    const auto n = static_cast<Eigen::Index>(block_of.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    Matrix w = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double mean = block_of[i] == block_of[j] ? intra_mean : inter_mean;
            const double v = std::max(0.0, mean + stddev * noise(rng));
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    return w;
}

}  // namespace

std::pair<Population, Population> generate_synthetic(const SyntheticConfig& cfg, int threads) {
    check_config(cfg);
    std::vector<int> block_of;
    for (std::size_t b = 0; b < cfg.block_partition.size(); ++b)
        block_of.insert(block_of.end(), cfg.block_partition[b], static_cast<int>(b));

    auto make = [&](int state, const std::string& label, double intra_mean) {
        Population pop;
        pop.state_label = label;
        for (int m = 0; m < cfg.M; ++m) pop.view_names.push_back("view" + std::to_string(m + 1));
        pop.subjects.resize(static_cast<std::size_t>(cfg.S));
        parallel_for(pop.subjects.size(), threads, [&](std::size_t s) {
            BrainMultigraph& g = pop.subjects[s];
            char id[64];
            std::snprintf(id, sizeof id, "%s_%03zu", label.c_str(), s);
            g.subject_id = id;
            for (int m = 0; m < cfg.M; ++m) {
                g.views.emplace_back(sample_view(block_of, intra_mean, cfg.inter_weight_mean,
                                                 cfg.weight_stddev,
                                                 derive_seed(cfg.seed, state, s, m)));
            }
        });
        return pop;
    };
    return {make(0, cfg.state_labels.first, cfg.intra_weight_mean.first),
            make(1, cfg.state_labels.second, cfg.intra_weight_mean.second)};
}

}  // namespace mgp
