#include "mgprof/experiment.hpp"

#include <cmath>
#include <cstdio>

#include "mgprof/errors.hpp"
#include "mgprof/io.hpp"
#include "mgprof/parallel.hpp"
#include "mgprof/svg.hpp"

namespace mgp {

using nlohmann::json;

const char* to_string(FeatureMode f) noexcept { return f == FeatureMode::Tail ? "tail" : "full"; }

FeatureMode parse_feature_mode(const std::string& s) {
    if (s == "tail") return FeatureMode::Tail;
    if (s == "full") return FeatureMode::Full;
    throw ConfigError("classifier", "unknown feature mode '" + s + "'");
}

const char* to_string(StddevMode m) noexcept {
    return m == StddevMode::Population ? "population" : "sample";
}

StddevMode parse_stddev_mode(const std::string& s) {
    if (s == "population") return StddevMode::Population;
    if (s == "sample") return StddevMode::Sample;
    throw ConfigError("sparsifier", "unknown stddev mode '" + s + "'");
}

void check_config(const ExperimentConfig& cfg) {
    if (!cfg.synthetic && cfg.manifests.size() != 2) {
        throw ConfigError("experiment", "need a synthetic config or exactly two manifests");
    }
    if (cfg.synthetic) check_config(*cfg.synthetic);
    if (cfg.alphas.empty()) throw ConfigError("experiment", "at least one alpha is required");
    for (double a : cfg.alphas)
        if (!std::isfinite(a)) throw ConfigError("experiment", "alpha must be finite");
    if (cfg.kinds.empty()) throw ConfigError("experiment", "no centrality kinds selected");
    check_config(cfg.diffusion);
    make_timescales(cfg.timescales.t_min, cfg.timescales.t_max, cfg.timescales.n_t);
    if (cfg.classifier.folds < 2) throw ConfigError("experiment", "folds must be >= 2");
    if (!(cfg.classifier.C > 0.0)) throw ConfigError("experiment", "C must be > 0");
    if (cfg.poly_degree < 0) throw ConfigError("experiment", "poly_degree must be >= 0");
}

namespace {

struct StateResult {
    PopulationProfile profile;
    std::vector<int> iterations;
    int floored = 0;
    int empty_views = 0;
    int slow_centrality = 0;
};

StateResult profile_population(const Population& pop, const DiffusionConfig& diffusion,
                               const Timescales& ts, ProfileScale scale, int threads) {
    std::vector<FusedGraph> fused(pop.subjects.size());
    std::vector<HeatTraceProfile> profiles(pop.subjects.size());
    parallel_for(pop.subjects.size(), threads, [&](std::size_t s) {
        fused[s] = fuse_multigraph(pop.subjects[s], diffusion);
        profiles[s] = profile_subject(fused[s], ts, scale);
    });
    StateResult out;
    for (const auto& f : fused) {
        out.iterations.push_back(f.iterations_run);
        out.floored += f.floored_count;
        out.empty_views += f.empty_views;
        out.slow_centrality += f.slow_centrality ? 1 : 0;
    }
    out.profile = population_profile(std::move(profiles), pop.state_label);
    return out;
}

Matrix feature_matrix(const PopulationProfile& p1, const PopulationProfile& p2, FeatureMode mode,
                      std::size_t tail) {
    const auto rows = static_cast<Eigen::Index>(p1.per_subject.size() + p2.per_subject.size());
    const auto cols =
        mode == FeatureMode::Tail ? Eigen::Index{1} : static_cast<Eigen::Index>(p1.mean_values.size());
    Matrix x(rows, cols);
    Eigen::Index r = 0;
    for (const auto* pop : {&p1, &p2}) {
        for (const auto& prof : pop->per_subject) {
            if (mode == FeatureMode::Tail) {
                x(r, 0) = prof.values[tail];
            } else {
                for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = prof.values[static_cast<std::size_t>(c)];
            }
            ++r;
        }
    }
    return x;
}

std::string alpha_tag(double alpha) { return io::format_double(alpha); }

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Population& s1, const Population& s2) {
    check_config(cfg);
    if (s1.subjects.empty() || s2.subjects.empty()) throw DataError("experiment", "empty population");
    if (s1.view_count() != s2.view_count() || s1.node_count() != s2.node_count()) {
        throw DataError("experiment", "populations differ in view count or node count");
    }
    const int threads = resolve_threads(cfg.threads);
    const Timescales ts = make_timescales(cfg.timescales.t_min, cfg.timescales.t_max, cfg.timescales.n_t);
    const std::size_t tail = resolve_tail_index(cfg.classifier.tail_index, ts.values.size());

    ExperimentReport report;
    report.state_s1 = s1.state_label;
    report.state_s2 = s2.state_label;
    report.timescales = ts;
    report.cv_seed = cfg.classifier.cv_seed;
    if (cfg.synthetic) report.data_seed = cfg.synthetic->seed;

    std::vector<ViewStatistics> stats1, stats2;
    for (std::size_t m = 0; m < s1.view_count(); ++m) {
        stats1.push_back(view_statistics(s1, m, cfg.stddev_mode));
        stats2.push_back(view_statistics(s2, m, cfg.stddev_mode));
    }

    std::vector<int> labels(s1.subject_count(), -1);
    labels.resize(s1.subject_count() + s2.subject_count(), 1);

    for (double alpha : cfg.alphas) {
        const Population sp1 = sparsify_population(s1, alpha, stats1);
        const Population sp2 = sparsify_population(s2, alpha, stats2);
        for (CentralityKind kind : cfg.kinds) {
            DiffusionConfig dcfg = cfg.diffusion;
            dcfg.centrality = kind;
            const StateResult r1 = profile_population(sp1, dcfg, ts, cfg.timescales.scale, threads);
            const StateResult r2 = profile_population(sp2, dcfg, ts, cfg.timescales.scale, threads);

            ExperimentRecord rec;
            rec.alpha = alpha;
            rec.kind = kind;
            rec.margin = state_margin(r1.profile, r2.profile, alpha, static_cast<int>(tail));
            rec.cv = cross_validate(feature_matrix(r1.profile, r2.profile, cfg.classifier.feature, tail),
                                    labels, cfg.classifier.folds, cfg.classifier.kernel, cfg.classifier.C,
                                    cfg.classifier.cv_seed);
            rec.mean_s1 = r1.profile.mean_values;
            rec.mean_s2 = r2.profile.mean_values;
            rec.iterations_s1 = r1.iterations;
            rec.iterations_s2 = r2.iterations;
            rec.floored_total = r1.floored + r2.floored;
            rec.empty_views_total = r1.empty_views + r2.empty_views;

            const std::string where = std::string("alpha=") + alpha_tag(alpha) + " " + to_string(kind);
            if (!rec.cv.all_converged) report.warnings.push_back(where + ": SVM hit the SMO update cap");
            if (r1.slow_centrality + r2.slow_centrality > 0) {
                report.warnings.push_back(where + ": " + std::to_string(r1.slow_centrality + r2.slow_centrality) +
                                          " subjects had slowly converging eigencentrality");
            }
            report.records.push_back(std::move(rec));
        }
    }

    for (CentralityKind kind : cfg.kinds) {
        std::vector<double> xs, ys;
        for (const auto& rec : report.records)
            if (rec.kind == kind) {
                xs.push_back(rec.alpha);
                ys.push_back(rec.margin.delta);
            }
        if (static_cast<int>(xs.size()) < cfg.poly_degree + 1) {
            report.warnings.push_back(std::string("polynomial fit skipped for ") + to_string(kind) + ": " +
                                      std::to_string(xs.size()) + " alphas for degree " +
                                      std::to_string(cfg.poly_degree));
            continue;
        }
        report.fits[to_string(kind)] = polyfit(xs, ys, cfg.poly_degree);
    }

    if (!cfg.output_dir.empty()) {
        io::write_text(cfg.output_dir / "report.json", to_json(report).dump(2) + "\n");
        emit_plot_data(report, cfg.output_dir);
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    check_config(cfg);
    if (cfg.synthetic) {
        const auto [s1, s2] = generate_synthetic(*cfg.synthetic, resolve_threads(cfg.threads));
        return run_experiment(cfg, s1, s2);
    }
    const Population s1 = load_population(cfg.manifests[0]);
    const Population s2 = load_population(cfg.manifests[1]);
    return run_experiment(cfg, s1, s2);
}

// ---------------------------------------------------------------------------
// Plot data

std::vector<std::filesystem::path> emit_plot_data(const ExperimentReport& report,
                                                  const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    auto write = [&](const std::string& name, const std::string& text) {
        io::write_text(out_dir / name, text);
        written.push_back(out_dir / name);
    };

    std::vector<std::string> kinds;
    for (const auto& rec : report.records) {
        const std::string k = to_string(rec.kind);
        if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) kinds.push_back(k);
    }

    // (a) population mean heat-trace curves
    std::string curves = "alpha,kind,state,t,h\n";
    for (const auto& rec : report.records) {
        const std::string prefix = io::format_double(rec.alpha) + ',' + to_string(rec.kind) + ',';
        for (const auto* state : {&report.state_s1, &report.state_s2}) {
            const auto& values = state == &report.state_s1 ? rec.mean_s1 : rec.mean_s2;
            for (std::size_t j = 0; j < values.size(); ++j) {
                curves += prefix + *state + ',' + io::format_double(report.timescales.values[j]) + ',' +
                          io::format_double(values[j]) + '\n';
            }
        }
    }
    write("curves.csv", curves);

    // (b) margins, CV accuracy, fits
    for (const auto& kind : kinds) {
        std::string margins = "alpha,delta,tail_s1,tail_s2\n";
        std::string cv = "alpha,fold,accuracy\n";
        for (const auto& rec : report.records) {
            if (to_string(rec.kind) != kind) continue;
            margins += io::format_double(rec.alpha) + ',' + io::format_double(rec.margin.delta) + ',' +
                       io::format_double(rec.margin.tail_s1) + ',' + io::format_double(rec.margin.tail_s2) + '\n';
            for (std::size_t f = 0; f < rec.cv.fold_accuracies.size(); ++f) {
                cv += io::format_double(rec.alpha) + ',' + std::to_string(f + 1) + ',' +
                      io::format_double(rec.cv.fold_accuracies[f]) + '\n';
            }
            cv += io::format_double(rec.alpha) + ",mean," + io::format_double(rec.cv.mean_accuracy) + '\n';
        }
        write("margins_" + kind + ".csv", margins);
        write("cv_" + kind + ".csv", cv);
    }

    std::size_t max_coeffs = 0;
    for (const auto& [kind, c] : report.fits) max_coeffs = std::max(max_coeffs, c.size());
    std::string fit = "kind";
    for (std::size_t i = 0; i < max_coeffs; ++i) fit += ",c" + std::to_string(i);
    fit += '\n';
    std::string samples = "kind,alpha,delta_fit\n";
    for (const auto& [kind, c] : report.fits) {
        fit += kind;
        for (double v : c) fit += ',' + io::format_double(v);
        fit += '\n';
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto& rec : report.records) {
            if (to_string(rec.kind) != kind) continue;
            lo = first ? rec.alpha : std::min(lo, rec.alpha);
            hi = first ? rec.alpha : std::max(hi, rec.alpha);
            first = false;
        }
        constexpr int kSamples = 50;
        for (int s = 0; s < kSamples; ++s) {
            const double a = lo + (hi - lo) * s / (kSamples - 1);
            samples += kind + ',' + io::format_double(a) + ',' + io::format_double(polyval(c, a)) + '\n';
        }
    }
    write("fit_coefficients.csv", fit);
    write("margin_fit_samples.csv", samples);

    // (c) SVG renderings
    static const char* kStateColors[] = {"#1f77b4", "#d62728"};
    static const char* kKindColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd"};
    std::vector<svg::Panel> curve_panels;
    for (const auto& rec : report.records) {
        svg::Panel p;
        p.title = std::string(to_string(rec.kind)) + ", alpha=" + io::format_double(rec.alpha) +
                  ", acc=" + io::format_double(std::round(rec.cv.mean_accuracy * 1000.0) / 1000.0);
        p.log_x = true;
        p.lines.push_back({report.state_s1, report.timescales.values, rec.mean_s1, kStateColors[0]});
        p.lines.push_back({report.state_s2, report.timescales.values, rec.mean_s2, kStateColors[1]});
        curve_panels.push_back(std::move(p));
    }
    write("heat_trace_profiles.svg",
          svg::render("Population mean heat-trace profiles", curve_panels,
                      static_cast<int>(std::max<std::size_t>(kinds.size(), 1)), "t (log scale)", "h(t)"));

    svg::Panel bars;
    bars.title = "Inter-state margin by sparsification level";
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        svg::Series s{kinds[k], {}, {}, kKindColors[k % 4]};
        for (const auto& rec : report.records) {
            if (to_string(rec.kind) != kinds[k]) continue;
            s.xs.push_back(rec.alpha);
            s.ys.push_back(rec.margin.delta);
        }
        bars.bars.push_back(s);
        const auto fit_it = report.fits.find(kinds[k]);
        if (fit_it != report.fits.end() && !s.xs.empty()) {
            svg::Series curve{"", {}, {}, kKindColors[k % 4]};
            const double lo = *std::min_element(s.xs.begin(), s.xs.end());
            const double hi = *std::max_element(s.xs.begin(), s.xs.end());
            for (int i = 0; i < 50; ++i) {
                const double a = lo + (hi - lo) * i / 49.0;
                curve.xs.push_back(a);
                curve.ys.push_back(polyval(fit_it->second, a));
            }
            bars.lines.push_back(std::move(curve));
        }
    }
    write("margins.svg", svg::render("Margin between states", {bars}, 1, "alpha", "delta"));
    return written;
}

// ---------------------------------------------------------------------------
// JSON

SyntheticConfig synthetic_config_from_json(const json& j) {
    SyntheticConfig cfg;
    try {
        cfg.n = j.value("n", cfg.n);
        cfg.M = j.value("M", cfg.M);
        cfg.S = j.value("S", cfg.S);
        cfg.block_partition = j.value("block_partition", cfg.block_partition);
        if (j.contains("intra_weight_mean")) {
            const auto v = j.at("intra_weight_mean").get<std::vector<double>>();
            if (v.size() != 2) throw ConfigError("dataset", "intra_weight_mean needs one value per state");
            cfg.intra_weight_mean = {v[0], v[1]};
        }
        cfg.inter_weight_mean = j.value("inter_weight_mean", cfg.inter_weight_mean);
        cfg.weight_stddev = j.value("weight_stddev", cfg.weight_stddev);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("state_labels")) {
            const auto v = j.at("state_labels").get<std::vector<std::string>>();
            if (v.size() != 2) throw ConfigError("dataset", "state_labels needs two entries");
            cfg.state_labels = {v[0], v[1]};
        }
    } catch (const json::exception& e) {
        throw ConfigError("dataset", std::string("synthetic config: ") + e.what());
    }
    check_config(cfg);
    return cfg;
}

json to_json(const SyntheticConfig& cfg) {
    return json{{"n", cfg.n},
                {"M", cfg.M},
                {"S", cfg.S},
                {"block_partition", cfg.block_partition},
                {"intra_weight_mean", {cfg.intra_weight_mean.first, cfg.intra_weight_mean.second}},
                {"inter_weight_mean", cfg.inter_weight_mean},
                {"weight_stddev", cfg.weight_stddev},
                {"seed", cfg.seed},
                {"state_labels", {cfg.state_labels.first, cfg.state_labels.second}}};
}

ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };
    try {
        if (j.contains("synthetic")) cfg.synthetic = synthetic_config_from_json(j.at("synthetic"));
        if (j.contains("manifests"))
            for (const auto& m : j.at("manifests")) cfg.manifests.push_back(resolve(m.get<std::string>()));
        cfg.alphas = j.value("alphas", cfg.alphas);
        if (j.contains("stddev_mode")) cfg.stddev_mode = parse_stddev_mode(j.at("stddev_mode").get<std::string>());
        if (j.contains("kinds")) {
            cfg.kinds.clear();
            for (const auto& k : j.at("kinds")) cfg.kinds.push_back(parse_centrality_kind(k.get<std::string>()));
        }
        if (j.contains("diffusion")) {
            const auto& d = j.at("diffusion");
            cfg.diffusion.u_star_max = d.value("u_star_max", cfg.diffusion.u_star_max);
            cfg.diffusion.convergence_tol = d.value("convergence_tol", cfg.diffusion.convergence_tol);
            cfg.diffusion.renormalize = d.value("renormalize", cfg.diffusion.renormalize);
            cfg.diffusion.allow_empty_views = d.value("allow_empty_views", cfg.diffusion.allow_empty_views);
        }
        if (j.contains("timescales")) {
            const auto& t = j.at("timescales");
            cfg.timescales.t_min = t.value("t_min", cfg.timescales.t_min);
            cfg.timescales.t_max = t.value("t_max", cfg.timescales.t_max);
            cfg.timescales.n_t = t.value("n_t", cfg.timescales.n_t);
            if (t.contains("profile_scale"))
                cfg.timescales.scale = parse_profile_scale(t.at("profile_scale").get<std::string>());
        }
        if (j.contains("classifier")) {
            const auto& c = j.at("classifier");
            if (c.contains("kernel")) cfg.classifier.kernel.type = parse_kernel_type(c.at("kernel").get<std::string>());
            cfg.classifier.kernel.gamma = c.value("gamma", cfg.classifier.kernel.gamma);
            cfg.classifier.kernel.coef0 = c.value("coef0", cfg.classifier.kernel.coef0);
            cfg.classifier.C = c.value("C", cfg.classifier.C);
            cfg.classifier.folds = c.value("folds", cfg.classifier.folds);
            cfg.classifier.cv_seed = c.value("cv_seed", cfg.classifier.cv_seed);
            if (c.contains("feature")) cfg.classifier.feature = parse_feature_mode(c.at("feature").get<std::string>());
            if (c.contains("tail_index")) cfg.classifier.tail_index = c.at("tail_index").get<int>();
        }
        cfg.poly_degree = j.value("poly_degree", cfg.poly_degree);
        cfg.threads = j.value("threads", cfg.threads);
        if (j.contains("output_dir")) cfg.output_dir = resolve(j.at("output_dir").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError("experiment", std::string("config: ") + e.what());
    }
    return cfg;
}

json to_json(const ExperimentReport& report) {
    json records = json::array();
    for (const auto& rec : report.records) {
        records.push_back({{"alpha", rec.alpha},
                           {"kind", to_string(rec.kind)},
                           {"margin",
                            {{"delta", rec.margin.delta},
                             {"tail_s1", rec.margin.tail_s1},
                             {"tail_s2", rec.margin.tail_s2}}},
                           {"cv",
                            {{"fold_accuracies", rec.cv.fold_accuracies},
                             {"mean_accuracy", rec.cv.mean_accuracy},
                             {"seed", rec.cv.seed},
                             {"all_converged", rec.cv.all_converged}}},
                           {"mean_s1", rec.mean_s1},
                           {"mean_s2", rec.mean_s2},
                           {"iterations_s1", rec.iterations_s1},
                           {"iterations_s2", rec.iterations_s2},
                           {"floored_total", rec.floored_total},
                           {"empty_views_total", rec.empty_views_total}});
    }
    json j{{"state_s1", report.state_s1},
           {"state_s2", report.state_s2},
           {"timescales", report.timescales.values},
           {"records", records},
           {"fits", report.fits},
           {"warnings", report.warnings},
           {"cv_seed", report.cv_seed}};
    j["data_seed"] = report.data_seed ? json(*report.data_seed) : json(nullptr);
    return j;
}

ExperimentReport experiment_report_from_json(const json& j) {
    ExperimentReport r;
    try {
        r.state_s1 = j.at("state_s1").get<std::string>();
        r.state_s2 = j.at("state_s2").get<std::string>();
        r.timescales.values = j.at("timescales").get<std::vector<double>>();
        for (const auto& x : j.at("records")) {
            ExperimentRecord rec;
            rec.alpha = x.at("alpha").get<double>();
            rec.kind = parse_centrality_kind(x.at("kind").get<std::string>());
            rec.margin.alpha = rec.alpha;
            rec.margin.delta = x.at("margin").at("delta").get<double>();
            rec.margin.tail_s1 = x.at("margin").at("tail_s1").get<double>();
            rec.margin.tail_s2 = x.at("margin").at("tail_s2").get<double>();
            rec.cv.fold_accuracies = x.at("cv").at("fold_accuracies").get<std::vector<double>>();
            rec.cv.mean_accuracy = x.at("cv").at("mean_accuracy").get<double>();
            rec.cv.seed = x.at("cv").at("seed").get<std::uint64_t>();
            rec.cv.all_converged = x.at("cv").value("all_converged", true);
            rec.mean_s1 = x.at("mean_s1").get<std::vector<double>>();
            rec.mean_s2 = x.at("mean_s2").get<std::vector<double>>();
            rec.iterations_s1 = x.value("iterations_s1", std::vector<int>{});
            rec.iterations_s2 = x.value("iterations_s2", std::vector<int>{});
            rec.floored_total = x.value("floored_total", 0);
            rec.empty_views_total = x.value("empty_views_total", 0);
            r.records.push_back(std::move(rec));
        }
        r.fits = j.value("fits", std::map<std::string, std::vector<double>>{});
        r.warnings = j.value("warnings", std::vector<std::string>{});
        r.cv_seed = j.value("cv_seed", std::uint64_t{0});
        if (j.contains("data_seed") && !j.at("data_seed").is_null())
            r.data_seed = j.at("data_seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw DataError("experiment", std::string("report: ") + e.what());
    }
    return r;
}

}  // namespace mgp
