#include "cli.hpp"

#include <algorithm>

#include <CLI11.hpp>
#include <json.hpp>

#include "mgprof/errors.hpp"
#include "mgprof/experiment.hpp"
#include "mgprof/io.hpp"
#include "mgprof/parallel.hpp"

namespace mgp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
    try {
        return json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw ConfigError("cli", path.string() + ": " + e.what());
    } catch (const LoadError&) {
        throw ConfigError("cli", "cannot read " + path.string());
    }
}

// Flag values shared by several subcommands. Each field is applied only when
// the user actually passed the flag, so config-file values survive.
struct PipelineFlags {
    std::vector<double> alphas;
    std::string stddev_mode = "population";
    std::vector<std::string> centrality;
    int iterations = 20;
    double tol = 1e-6;
    bool no_renormalize = false;
    bool strict_empty_views = false;
    double t_min = 1e-2;
    double t_max = 1e3;
    int n_t = 250;
    std::string profile_scale = "trace";
    std::string kernel = "sigmoid";
    double C = 1.0;
    double gamma = 0.0;
    double coef0 = 0.0;
    int folds = 5;
    std::uint64_t cv_seed = 0;
    std::string feature = "tail";
    int tail_index = -1;
    int threads = 0;

    // Several subcommands register the same flag; keep every registration.
    std::map<std::string, std::vector<CLI::Option*>> opts;

    CLI::Option*& slot(const std::string& name) { return opts[name].emplace_back(nullptr); }

    bool given(const std::string& name) const {
        const auto it = opts.find(name);
        if (it == opts.end()) return false;
        return std::any_of(it->second.begin(), it->second.end(), [](const CLI::Option* o) { return o->count() > 0; });
    }

    void add_alpha(CLI::App* app) {
        slot("alpha") = app->add_option("--alpha", alphas, "Sparsification coefficient (repeatable)");
        slot("stddev-mode") = app->add_option("--stddev-mode", stddev_mode, "population|sample")
                                  ->check(CLI::IsMember({"population", "sample"}));
    }
    void add_diffusion(CLI::App* app) {
        slot("centrality") = app->add_option("--centrality", centrality, "eigen|strength")
                                 ->check(CLI::IsMember({"eigen", "strength"}));
        slot("iterations") = app->add_option("--iterations", iterations, "Maximum diffusion iterations");
        slot("tol") = app->add_option("--tol", tol, "Diffusion convergence tolerance");
        slot("no-renormalize") = app->add_flag("--no-renormalize", no_renormalize,
                                               "Disable per-iteration sum renormalization");
        slot("strict-empty-views") = app->add_flag("--strict-empty-views", strict_empty_views,
                                                   "Fail on views with no edges");
    }
    void add_timescales(CLI::App* app) {
        slot("t-min") = app->add_option("--t-min", t_min);
        slot("t-max") = app->add_option("--t-max", t_max);
        slot("n-t") = app->add_option("--n-t", n_t, "Number of timescales");
        slot("profile-scale") = app->add_option("--profile-scale", profile_scale, "trace|mean")
                                    ->check(CLI::IsMember({"trace", "mean"}));
    }
    void add_tail(CLI::App* app) {
        slot("tail-index") = app->add_option("--tail-index", tail_index,
                                             "Profile index used as the tail (negative counts from the end)");
    }
    void add_classifier(CLI::App* app) {
        slot("kernel") = app->add_option("--kernel", kernel, "linear|sigmoid")
                             ->check(CLI::IsMember({"linear", "sigmoid"}));
        slot("C") = app->add_option("--C", C, "SVM box constraint");
        slot("gamma") = app->add_option("--gamma", gamma, "Sigmoid kernel gamma (0 = auto)");
        slot("coef0") = app->add_option("--coef0", coef0, "Sigmoid kernel offset");
        slot("folds") = app->add_option("--folds", folds, "Cross-validation folds");
        slot("cv-seed") = app->add_option("--cv-seed", cv_seed, "Fold shuffle seed");
        slot("feature") = app->add_option("--feature", feature, "tail|full")
                              ->check(CLI::IsMember({"tail", "full"}));
    }
    void add_threads(CLI::App* app) {
        slot("threads") = app->add_option("--threads", threads, "Worker threads (default $PROFILER_THREADS or 1)");
    }

    void apply(DiffusionConfig& d) const {
        if (given("iterations")) d.u_star_max = iterations;
        if (given("tol")) d.convergence_tol = tol;
        if (given("no-renormalize")) d.renormalize = !no_renormalize;
        if (given("strict-empty-views")) d.allow_empty_views = !strict_empty_views;
        if (given("centrality") && !centrality.empty()) d.centrality = parse_centrality_kind(centrality.front());
    }
    void apply(TimescaleSettings& t) const {
        if (given("t-min")) t.t_min = t_min;
        if (given("t-max")) t.t_max = t_max;
        if (given("n-t")) t.n_t = n_t;
        if (given("profile-scale")) t.scale = parse_profile_scale(profile_scale);
    }
    void apply(ClassifierSettings& c) const {
        if (given("kernel")) c.kernel.type = parse_kernel_type(kernel);
        if (given("gamma")) c.kernel.gamma = gamma;
        if (given("coef0")) c.kernel.coef0 = coef0;
        if (given("C")) c.C = C;
        if (given("folds")) c.folds = folds;
        if (given("cv-seed")) c.cv_seed = cv_seed;
        if (given("feature")) c.feature = parse_feature_mode(feature);
        if (given("tail-index")) c.tail_index = tail_index;
    }
    ClassifierSettings classifier() const {
        ClassifierSettings c;
        apply(c);
        return c;
    }
    std::optional<int> tail() const { return given("tail-index") ? std::optional<int>(tail_index) : std::nullopt; }
};

std::string subject_fused_file(const std::string& id) { return id + "_fused.csv"; }

// --- subcommands -----------------------------------------------------------

int cmd_gen(const fs::path& config, const fs::path& out_dir, int threads, std::ostream& out) {
    const SyntheticConfig cfg = synthetic_config_from_json(read_json(config));
    const auto [s1, s2] = generate_synthetic(cfg, resolve_threads(threads));
    for (const Population* pop : {&s1, &s2}) {
        const fs::path manifest = out_dir / pop->state_label / "manifest.json";
        save_population(*pop, manifest);
        out << manifest.string() << '\n';
    }
    return kOk;
}

int cmd_validate(const fs::path& manifest, std::ostream& out) {
    const Population pop = load_population(manifest);
    int bad = 0;
    for (const auto& g : pop.subjects) {
        const ValidationVerdict v = validate_multigraph(g);
        if (v.ok()) {
            out << g.subject_id << ": ok\n";
            continue;
        }
        ++bad;
        for (const auto& msg : v.violations) out << g.subject_id << ": " << msg << '\n';
    }
    out << pop.state_label << ": S=" << pop.subject_count() << " M=" << pop.view_count()
        << " n=" << pop.node_count() << (bad ? " INVALID" : " OK") << '\n';
    return bad ? kDataError : kOk;
}

int cmd_sparsify(const fs::path& manifest, const fs::path& out_dir, const PipelineFlags& f,
                 std::ostream& out) {
    const Population pop = load_population(manifest);
    const StddevMode mode = parse_stddev_mode(f.stddev_mode);
    std::vector<double> alphas = f.alphas;
    if (alphas.empty()) throw ConfigError("sparsifier", "at least one --alpha is required");
    std::sort(alphas.begin(), alphas.end());
    const SparsificationGrid grid = make_grid(pop, alphas, mode);
    std::string thresholds = "view,mu,sigma";
    for (double a : alphas) thresholds += ",rho_" + io::format_double(a);
    thresholds += '\n';
    for (std::size_t m = 0; m < grid.stats.size(); ++m) {
        thresholds += std::to_string(m) + ',' + io::format_double(grid.stats[m].mu) + ',' +
                      io::format_double(grid.stats[m].sigma);
        for (double rho : grid.thresholds[m]) thresholds += ',' + io::format_double(rho);
        thresholds += '\n';
    }
    io::write_text(out_dir / "thresholds.csv", thresholds);
    for (double a : alphas) {
        const fs::path target = out_dir / ("alpha_" + io::format_double(a)) / "manifest.json";
        save_population(sparsify_population(pop, a, grid.stats), target);
        out << target.string() << '\n';
    }
    return kOk;
}

int cmd_fuse(const fs::path& manifest, const fs::path& out_dir, const PipelineFlags& f, std::ostream& out) {
    const Population pop = load_population(manifest);
    DiffusionConfig cfg;
    f.apply(cfg);
    std::vector<FusedGraph> fused(pop.subjects.size());
    parallel_for(pop.subjects.size(), resolve_threads(f.threads),
                 [&](std::size_t s) { fused[s] = fuse_multigraph(pop.subjects[s], cfg); });
    json doc{{"state_label", pop.state_label}, {"centrality", to_string(cfg.centrality)}, {"subjects", json::array()}};
    for (const auto& g : fused) {
        io::write_matrix_csv(g.weights, out_dir / subject_fused_file(g.subject_id));
        doc["subjects"].push_back({{"id", g.subject_id},
                                   {"path", subject_fused_file(g.subject_id)},
                                   {"iterations_run", g.iterations_run},
                                   {"floored_count", g.floored_count},
                                   {"empty_views", g.empty_views}});
    }
    io::write_text(out_dir / "fused.json", doc.dump(2) + "\n");
    out << (out_dir / "fused.json").string() << '\n';
    return kOk;
}

int cmd_profile(const fs::path& fused_manifest, const fs::path& out_csv, const PipelineFlags& f,
                std::ostream& out) {
    json doc;
    try {
        doc = json::parse(io::read_text(fused_manifest));
    } catch (const json::exception& e) {
        throw LoadError(LoadErrorKind::ParseError, fused_manifest.string() + ": " + e.what());
    }
    TimescaleSettings t;
    f.apply(t);
    const Timescales ts = make_timescales(t.t_min, t.t_max, t.n_t);
    const auto& subjects = doc.at("subjects");
    std::vector<HeatTraceProfile> profiles(subjects.size());
    parallel_for(subjects.size(), resolve_threads(f.threads), [&](std::size_t s) {
        FusedGraph g;
        g.subject_id = subjects[s].at("id").get<std::string>();
        fs::path p = subjects[s].at("path").get<std::string>();
        if (p.is_relative()) p = fused_manifest.parent_path() / p;
        g.weights = ConnectivityMatrix::checked(io::read_matrix_csv(p), 1e-8, p.string()).weights;
        profiles[s] = profile_subject(g, ts, t.scale);
    });
    write_profiles_csv(profiles, out_csv);
    out << out_csv.string() << '\n';
    return kOk;
}

std::pair<PopulationProfile, PopulationProfile> read_two_populations(const std::vector<fs::path>& files) {
    if (files.size() != 2) throw ConfigError("cli", "exactly two --profiles files are required");
    return {population_profile(read_profiles_csv(files[0]), files[0].stem().string()),
            population_profile(read_profiles_csv(files[1]), files[1].stem().string())};
}

int cmd_margin(const std::vector<fs::path>& files, double alpha, const fs::path& out_csv,
               const PipelineFlags& f, std::ostream& out) {
    const auto [p1, p2] = read_two_populations(files);
    const MarginReport m = state_margin(p1, p2, alpha, f.tail());
    const std::string csv = "alpha,delta,tail_s1,tail_s2\n" + io::format_double(m.alpha) + ',' +
                            io::format_double(m.delta) + ',' + io::format_double(m.tail_s1) + ',' +
                            io::format_double(m.tail_s2) + '\n';
    if (!out_csv.empty()) io::write_text(out_csv, csv);
    out << csv;
    return kOk;
}

int cmd_classify(const std::vector<fs::path>& files, const fs::path& out_csv, const PipelineFlags& f,
                 std::ostream& out) {
    const auto [p1, p2] = read_two_populations(files);
    const ClassifierSettings c = f.classifier();
    const std::size_t tail = resolve_tail_index(c.tail_index, p1.mean_values.size());
    const auto cols = c.feature == FeatureMode::Tail ? Eigen::Index{1}
                                                     : static_cast<Eigen::Index>(p1.mean_values.size());
    Matrix x(static_cast<Eigen::Index>(p1.per_subject.size() + p2.per_subject.size()), cols);
    std::vector<int> labels;
    Eigen::Index r = 0;
    for (const auto* pop : {&p1, &p2}) {
        for (const auto& prof : pop->per_subject) {
            for (Eigen::Index col = 0; col < cols; ++col)
                x(r, col) = c.feature == FeatureMode::Tail ? prof.values[tail] : prof.values[static_cast<std::size_t>(col)];
            labels.push_back(pop == &p1 ? -1 : 1);
            ++r;
        }
    }
    const CvReport report = cross_validate(x, labels, c.folds, c.kernel, c.C, c.cv_seed);
    const std::string csv = cv_report_csv(report);
    if (!out_csv.empty()) io::write_text(out_csv, csv);
    out << csv;
    return kOk;
}

int cmd_experiment(const fs::path& config_path, const fs::path& synthetic_path,
                   const std::vector<fs::path>& manifests, const fs::path& out_dir, const PipelineFlags& f,
                   std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = experiment_config_from_json(read_json(config_path), config_path.parent_path());
    if (!synthetic_path.empty()) {
        cfg.synthetic = synthetic_config_from_json(read_json(synthetic_path));
        cfg.manifests.clear();
    }
    if (!manifests.empty()) {
        cfg.manifests = manifests;
        cfg.synthetic.reset();
    }
    if (f.given("alpha")) {
        cfg.alphas = f.alphas;
        std::sort(cfg.alphas.begin(), cfg.alphas.end());
    }
    if (f.given("stddev-mode")) cfg.stddev_mode = parse_stddev_mode(f.stddev_mode);
    if (f.given("centrality")) {
        cfg.kinds.clear();
        for (const auto& k : f.centrality) cfg.kinds.push_back(parse_centrality_kind(k));
    }
    f.apply(cfg.diffusion);
    f.apply(cfg.timescales);
    f.apply(cfg.classifier);
    if (f.given("threads")) cfg.threads = f.threads;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.output_dir.empty()) throw ConfigError("cli", "an output directory is required (--out)");

    const ExperimentReport report = run_experiment(cfg);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';
    out << "alpha,kind,delta,mean_accuracy\n";
    for (const auto& rec : report.records) {
        out << io::format_double(rec.alpha) << ',' << to_string(rec.kind) << ','
            << io::format_double(rec.margin.delta) << ',' << io::format_double(rec.cv.mean_accuracy) << '\n';
    }
    return kOk;
}

int cmd_plot(const fs::path& report_path, const fs::path& out_dir, std::ostream& out) {
    const ExperimentReport report = experiment_report_from_json(read_json(report_path));
    for (const auto& p : emit_plot_data(report, out_dir)) out << p.string() << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multigraph fusion and heat-trace profiling"};
    app.require_subcommand(1);
    PipelineFlags f;

    fs::path config, out_dir, manifest, fused, report, out_csv, synthetic;
    std::vector<fs::path> manifests, profiles;
    double margin_alpha = 0.0;

    auto* gen = app.add_subcommand("gen", "Generate two synthetic populations");
    gen->add_option("--config", config, "Synthetic config (JSON)")->required();
    gen->add_option("--out", out_dir, "Output directory")->required();
    f.add_threads(gen);

    auto* validate = app.add_subcommand("validate", "Load and validate a population manifest");
    validate->add_option("--manifest", manifest)->required();

    auto* sparsify = app.add_subcommand("sparsify", "Threshold every view at mu + alpha * sigma");
    sparsify->add_option("--manifest", manifest)->required();
    sparsify->add_option("--out", out_dir)->required();
    f.add_alpha(sparsify);

    auto* fuse = app.add_subcommand("fuse", "Cross-diffuse and fuse every subject");
    fuse->add_option("--manifest", manifest)->required();
    fuse->add_option("--out", out_dir)->required();
    f.add_diffusion(fuse);
    f.add_threads(fuse);

    auto* profile = app.add_subcommand("profile", "Heat-trace profiles of fused graphs");
    profile->add_option("--fused", fused, "fused.json written by `fuse`")->required();
    profile->add_option("--out", out_csv, "Profile CSV")->required();
    f.add_timescales(profile);
    f.add_threads(profile);

    auto* margin = app.add_subcommand("margin", "Tail margin between two profile files");
    margin->add_option("--profiles", profiles, "Two profile CSVs")->required()->expected(1, 2);
    margin->add_option("--alpha", margin_alpha, "Alpha recorded in the output row");
    margin->add_option("--out", out_csv);
    f.add_tail(margin);

    auto* classify = app.add_subcommand("classify", "Cross-validated SVM on two profile files");
    classify->add_option("--profiles", profiles, "Two profile CSVs")->required()->expected(1, 2);
    classify->add_option("--out", out_csv);
    f.add_classifier(classify);
    f.add_tail(classify);

    auto* experiment = app.add_subcommand("experiment", "Full pipeline over an alpha grid");
    experiment->add_option("--config", config, "Experiment config (JSON)");
    experiment->add_option("--synthetic", synthetic, "Synthetic data config (JSON)");
    experiment->add_option("--manifest", manifests, "Population manifest (give two)");
    experiment->add_option("--out", out_dir);
    f.add_alpha(experiment);
    f.add_diffusion(experiment);
    f.add_timescales(experiment);
    f.add_classifier(experiment);
    f.add_tail(experiment);
    f.add_threads(experiment);

    auto* plot = app.add_subcommand("plot", "Re-render plot data from report.json");
    plot->add_option("--report", report)->required();
    plot->add_option("--out", out_dir)->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    }

    try {
        if (*gen) return cmd_gen(config, out_dir, f.threads, out);
        if (*validate) return cmd_validate(manifest, out);
        if (*sparsify) return cmd_sparsify(manifest, out_dir, f, out);
        if (*fuse) return cmd_fuse(manifest, out_dir, f, out);
        if (*profile) return cmd_profile(fused, out_csv, f, out);
        if (*margin) return cmd_margin(profiles, margin_alpha, out_csv, f, out);
        if (*classify) return cmd_classify(profiles, out_csv, f, out);
        if (*experiment) return cmd_experiment(config, synthetic, manifests, out_dir, f, out, err);
        if (*plot) return cmd_plot(report, out_dir, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace mgp::cli
