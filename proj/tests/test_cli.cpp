#include <doctest.h>

#include <sstream>

#include "cli.hpp"
#include "mgprof/dataset.hpp"
#include "mgprof/experiment.hpp"
#include "mgprof/io.hpp"
#include "test_util.hpp"

using namespace mgp;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "mgprof");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

void write_small_synthetic(const std::filesystem::path& path, std::uint64_t seed = 4) {
    SyntheticConfig s;
    s.n = 10;
    s.M = 2;
    s.S = 6;
    s.block_partition = {4, 3, 3};
    s.seed = seed;
    io::write_text(path, to_json(s).dump(2));
}

// Single-subject population with the given views.
std::filesystem::path write_population(const testutil::TempDir& dir, const std::string& name,
                                       const std::vector<Matrix>& views) {
    const auto base = dir / name;
    std::filesystem::create_directories(base);
    nlohmann::json views_json = nlohmann::json::array();
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t m = 0; m < views.size(); ++m) {
        const std::string f = "v" + std::to_string(m) + ".csv";
        io::write_matrix_csv(views[m], base / f);
        views_json.push_back("view" + std::to_string(m + 1));
        files.push_back(f);
    }
    const nlohmann::json manifest{{"state_label", name},
                                  {"view_names", views_json},
                                  {"subjects", nlohmann::json::array({{{"id", "s0"}, {"views", files}}})}};
    io::write_text(base / "manifest.json", manifest.dump());
    return base / "manifest.json";
}

}  // namespace

TEST_CASE("cli: full stage-by-stage pipeline") {
    testutil::TempDir dir;
    write_small_synthetic(dir / "syn.json");
    const Result gen = run({"gen", "--config", (dir / "syn.json").string(), "--out", (dir / "data").string()});
    REQUIRE(gen.code == 0);
    for (const char* state : {"NC", "ASD"}) {
        const std::string manifest = (dir / "data" / state / "manifest.json").string();
        CHECK(run({"validate", "--manifest", manifest}).code == 0);

        const std::string sp = (dir / "sp" / state).string();
        REQUIRE(run({"sparsify", "--manifest", manifest, "--out", sp, "--alpha", "1.4", "--alpha", "1"}).code == 0);
        CHECK(std::filesystem::exists(dir / "sp" / state / "thresholds.csv"));
        const auto alpha_manifest = dir / "sp" / state / "alpha_1" / "manifest.json";
        REQUIRE(std::filesystem::exists(alpha_manifest));
        CHECK(std::filesystem::exists(dir / "sp" / state / "alpha_1.4" / "manifest.json"));

        const std::string fused = (dir / "fused" / state).string();
        REQUIRE(run({"fuse", "--manifest", alpha_manifest.string(), "--out", fused}).code == 0);
        const Result prof = run({"profile", "--fused", fused + "/fused.json", "--out",
                                 (dir / (std::string(state) + ".csv")).string(), "--n-t", "15"});
        REQUIRE(prof.code == 0);
    }
    const std::string p1 = (dir / "NC.csv").string();
    const std::string p2 = (dir / "ASD.csv").string();
    const Result margin = run({"margin", "--profiles", p1, p2, "--alpha", "1"});
    REQUIRE(margin.code == 0);
    CHECK(margin.out.rfind("alpha,delta,tail_s1,tail_s2\n1,", 0) == 0);

    const Result cls = run({"classify", "--profiles", p1, p2, "--folds", "3"});
    REQUIRE(cls.code == 0);
    CHECK(cls.out.rfind("fold,accuracy\n", 0) == 0);
    CHECK(run({"classify", "--profiles", p1, p2, "--folds", "3"}).out == cls.out);
}

TEST_CASE("cli: experiment and plot") {
    testutil::TempDir dir;
    write_small_synthetic(dir / "syn.json");
    const Result r = run({"experiment", "--synthetic", (dir / "syn.json").string(), "--out", (dir / "exp").string(),
                          "--n-t", "12", "--folds", "3", "--alpha", "1", "--alpha", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("alpha,kind,delta,mean_accuracy\n", 0) == 0);
    CHECK(r.err.find("polynomial fit skipped") != std::string::npos);
    REQUIRE(std::filesystem::exists(dir / "exp" / "report.json"));

    REQUIRE(run({"plot", "--report", (dir / "exp" / "report.json").string(), "--out", (dir / "plot").string()}).code == 0);
    CHECK(io::read_text(dir / "plot" / "curves.csv") == io::read_text(dir / "exp" / "curves.csv"));
    CHECK(io::read_text(dir / "plot" / "margins.svg") == io::read_text(dir / "exp" / "margins.svg"));

    // Same run on three threads writes identical bytes.
    REQUIRE(run({"experiment", "--synthetic", (dir / "syn.json").string(), "--out", (dir / "exp3").string(),
                 "--n-t", "12", "--folds", "3", "--alpha", "1", "--alpha", "2", "--threads", "3"})
                .code == 0);
    CHECK(io::read_text(dir / "exp3" / "report.json") == io::read_text(dir / "exp" / "report.json"));

    // A config file supplies defaults; flags override.
    io::write_text(dir / "cfg.json", R"({"synthetic": {"n": 10, "M": 2, "S": 6, "block_partition": [4, 3, 3]},
                                         "alphas": [1.0], "kinds": ["strength"],
                                         "timescales": {"n_t": 8}, "classifier": {"folds": 2},
                                         "output_dir": "cfg_out"})");
    const Result c = run({"experiment", "--config", (dir / "cfg.json").string(), "--n-t", "9"});
    REQUIRE(c.code == 0);
    const auto report = experiment_report_from_json(nlohmann::json::parse(io::read_text(dir / "cfg_out" / "report.json")));
    CHECK(report.records.size() == 1);
    CHECK(report.timescales.values.size() == 9);
}

TEST_CASE("cli: exit codes") {
    testutil::TempDir dir;
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"validate"}).code == 2);
    CHECK(run({"--help"}).code == 0);

    write_small_synthetic(dir / "syn.json");
    CHECK(run({"experiment", "--synthetic", (dir / "syn.json").string()}).code == 2);
    CHECK(run({"experiment", "--synthetic", (dir / "syn.json").string(), "--out", (dir / "x").string(),
               "--kernel", "rbf"})
              .code == 2);
    io::write_text(dir / "bad.json", R"({"n": 10, "M": 2, "S": 6, "block_partition": [4, 4]})");
    CHECK(run({"gen", "--config", (dir / "bad.json").string(), "--out", (dir / "g").string()}).code == 2);

    CHECK(run({"validate", "--manifest", (dir / "missing.json").string()}).code == 3);
    io::write_text(dir / "garbage.json", "{not json");
    CHECK(run({"validate", "--manifest", (dir / "garbage.json").string()}).code == 3);

    Matrix good(3, 3);
    good << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    Matrix asym = good;
    asym(0, 1) = 5.0;
    const auto invalid = write_population(dir, "asym", {good, asym});
    const Result v = run({"validate", "--manifest", invalid.string()});
    CHECK(v.code == 3);

    Matrix zero = Matrix::Zero(3, 3);
    const auto empty_view = write_population(dir, "empty", {good, zero});
    CHECK(run({"fuse", "--manifest", empty_view.string(), "--out", (dir / "f1").string()}).code == 0);
    CHECK(run({"fuse", "--manifest", empty_view.string(), "--out", (dir / "f2").string(), "--strict-empty-views"})
              .code == 3);

    // Weights near the top of the double range overflow inside the diffusion.
    Matrix huge = Matrix::Constant(3, 3, 1e308);
    huge.diagonal().setZero();
    const auto overflow = write_population(dir, "huge", {huge, huge});
    const Result o = run({"fuse", "--manifest", overflow.string(), "--out", (dir / "f3").string()});
    CHECK(o.code == 4);
}
