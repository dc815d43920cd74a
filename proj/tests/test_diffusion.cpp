#include <doctest.h>

#include "mgprof/diffusion.hpp"
#include "mgprof/errors.hpp"
#include "oracles.hpp"

using namespace mgp;

namespace {

const double kR2 = std::sqrt(2.0);
const double kInvR2 = std::sqrt(0.5);

Matrix k2() {
    Matrix w(2, 2);
    w << 0, 1, 1, 0;
    return w;
}

CentralityDiag diag(std::initializer_list<double> v) {
    CentralityDiag e;
    e.values = Vector(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) e.values[i++] = x;
    return e;
}

Matrix cycle(int n) {
    Matrix w = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) w(i, (i + 1) % n) = w((i + 1) % n, i) = 1.0;
    return w;
}

BrainMultigraph random_multigraph(std::mt19937_64& rng, int n, int views) {
    BrainMultigraph g{"r", {}};
    for (int m = 0; m < views; ++m) g.views.emplace_back(oracle::random_connected_graph(n, rng, 0.4));
    return g;
}

}  // namespace

TEST_CASE("init_status examples") {
    const StatusMatrix p = init_status(ConnectivityMatrix(k2()), diag({kInvR2, kInvR2}));
    CHECK(p.values(0, 1) == doctest::Approx(kR2).epsilon(1e-12));
    CHECK(p.values(1, 0) == doctest::Approx(kR2).epsilon(1e-12));
    CHECK(p.values(0, 0) == 0.0);

    Matrix w(3, 3);
    w << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(init_status(ConnectivityMatrix(w), diag({1, 1, 1})).values == w);

    // E^-1 W = [[0,2,0],[r2,0,r2],[0,2,0]] before symmetrization.
    const StatusMatrix p3 = init_status(ConnectivityMatrix(w), diag({0.5, kInvR2, 0.5}));
    const double v = (2.0 + kR2) / 2.0;
    Matrix expected(3, 3);
    expected << 0, v, 0, v, 0, v, 0, v, 0;
    CHECK((p3.values - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(p3.values == p3.values.transpose());

    CHECK_THROWS_AS(init_status(ConnectivityMatrix(w), diag({1, 1})), ConfigError);
}

TEST_CASE("diffusion_step examples on K2") {
    const auto e = diag({kInvR2, kInvR2});
    const StatusMatrix p = init_status(ConnectivityMatrix(k2()), e);
    const std::vector<StatusMatrix> statuses{p, p};
    const std::vector<CentralityDiag> es{e, e};

    const auto plain = diffusion_step(statuses, es);
    for (const auto& s : plain) {
        CHECK(s.values(0, 1) == doctest::Approx(kInvR2).epsilon(1e-12));
        CHECK(s.values(1, 0) == doctest::Approx(kInvR2).epsilon(1e-12));
        CHECK(s.iteration == 2);
    }

    const std::vector<double> targets{p.values.sum(), p.values.sum()};
    const auto renorm = diffusion_step(statuses, es, targets);
    for (const auto& s : renorm) CHECK((s.values - p.values).cwiseAbs().maxCoeff() <= 1e-12);

    CHECK_THROWS_AS(diffusion_step(std::vector<StatusMatrix>{p}, std::vector<CentralityDiag>{e}), ConfigError);
}

TEST_CASE("identical views give identical statuses") {
    std::mt19937_64 rng(3);
    const Matrix w = oracle::random_connected_graph(7, rng);
    const auto e = eigencentrality(ConnectivityMatrix(w));
    const StatusMatrix p = init_status(ConnectivityMatrix(w), e);
    const std::vector<StatusMatrix> statuses{p, p, p};
    const std::vector<CentralityDiag> es{e, e, e};
    const auto next = diffusion_step(statuses, es);
    CHECK(next[0].values == next[1].values);
    CHECK(next[1].values == next[2].values);
}

TEST_CASE("renormalization holds entry sums; unnormalized K2 halves") {
    std::mt19937_64 rng(9);
    const Matrix w = oracle::random_connected_graph(9, rng);
    const auto e = eigencentrality(ConnectivityMatrix(w));
    const StatusMatrix p1 = init_status(ConnectivityMatrix(w), e);
    std::vector<StatusMatrix> statuses{p1, p1};
    const std::vector<CentralityDiag> es{e, e};
    const std::vector<double> targets{p1.values.sum(), p1.values.sum()};
    for (int u = 0; u < 5; ++u) {
        statuses = diffusion_step(statuses, es, targets);
        CHECK(statuses[0].values.sum() == doctest::Approx(targets[0]).epsilon(1e-12));
    }

    const auto ek = diag({kInvR2, kInvR2});
    const StatusMatrix k = init_status(ConnectivityMatrix(k2()), ek);
    std::vector<StatusMatrix> ks{k, k};
    const std::vector<CentralityDiag> eks{ek, ek};
    double prev = k.values.sum();
    for (int u = 0; u < 20; ++u) {
        ks = diffusion_step(ks, eks);
        const double now = ks[0].values.sum();
        CHECK(now / prev == doctest::Approx(0.5).epsilon(1e-12));
        prev = now;
    }
}

TEST_CASE("fuse_multigraph on identical K2 views") {
    const BrainMultigraph g{"k2", {ConnectivityMatrix(k2()), ConnectivityMatrix(k2())}};
    const FusedGraph f = fuse_multigraph(g, {});
    CHECK(f.iterations_run == 1);
    CHECK(f.weights(0, 1) == doctest::Approx(kR2).epsilon(1e-12));
    CHECK(f.weights(1, 0) == doctest::Approx(kR2).epsilon(1e-12));
    CHECK(f.subject_id == "k2");

    DiffusionConfig no_renorm;
    no_renorm.renormalize = false;
    const FusedGraph shrunk = fuse_multigraph(g, no_renorm);
    CHECK(shrunk.iterations_run == 20);
    CHECK(shrunk.weights(0, 1) == doctest::Approx(kR2 * std::pow(0.5, 20)).epsilon(1e-10));
}

TEST_CASE("fuse_multigraph preconditions") {
    const BrainMultigraph single{"s", {ConnectivityMatrix(k2())}};
    CHECK_THROWS_AS(fuse_multigraph(single, {}), ConfigError);

    const BrainMultigraph with_empty{"e", {ConnectivityMatrix(k2()), ConnectivityMatrix(Matrix::Zero(2, 2))}};
    DiffusionConfig strict;
    strict.allow_empty_views = false;
    CHECK_THROWS_AS(fuse_multigraph(with_empty, strict), DataError);

    const FusedGraph lenient = fuse_multigraph(with_empty, {});
    CHECK(lenient.empty_views == 1);
    CHECK(lenient.weights.allFinite());

    DiffusionConfig bad;
    bad.u_star_max = 0;
    CHECK_THROWS_AS(fuse_multigraph(with_empty, bad), ConfigError);
}

TEST_CASE("fused output contract on random multigraphs") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        BrainMultigraph g{"r", {}};
        for (int m = 0; m < 3; ++m) g.views.emplace_back(oracle::random_weighted_graph(8, rng, 0.4));
        for (CentralityKind kind : {CentralityKind::Eigen, CentralityKind::Strength}) {
            DiffusionConfig cfg;
            cfg.centrality = kind;
            const FusedGraph f = fuse_multigraph(g, cfg);
            CHECK(f.weights == f.weights.transpose());
            CHECK(f.weights.diagonal().isZero(0.0));
            CHECK((f.weights.array() >= 0.0).all());
            CHECK(f.weights.allFinite());
            CHECK(f.iterations_run >= 1);
            CHECK(f.iterations_run <= 20);
        }
    }
}

TEST_CASE("view order does not change the fused graph") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const BrainMultigraph g = random_multigraph(rng, 10, 4);
        BrainMultigraph shuffled = g;
        std::shuffle(shuffled.views.begin(), shuffled.views.end(), rng);
        CHECK(fuse_multigraph(g, {}).weights == fuse_multigraph(shuffled, {}).weights);
    }
}

TEST_CASE("node relabeling permutes the fused graph") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const BrainMultigraph g = random_multigraph(rng, 9, 3);
        const auto perm = oracle::random_permutation(9, rng);
        BrainMultigraph pg = g;
        for (auto& v : pg.views) v.weights = perm * v.weights * perm.transpose();
        const Matrix expected = perm * fuse_multigraph(g, {}).weights * perm.transpose();
        const Matrix got = fuse_multigraph(pg, {}).weights;
        CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, expected.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("eigen and strength pipelines agree on regular graphs") {
    for (int n : {5, 8}) {
        const BrainMultigraph g{"c", {ConnectivityMatrix(cycle(n)), ConnectivityMatrix(cycle(n)),
                                      ConnectivityMatrix(cycle(n))}};
        DiffusionConfig eigen, strength;
        strength.centrality = CentralityKind::Strength;
        const Matrix a = fuse_multigraph(g, eigen).weights;
        const Matrix b = fuse_multigraph(g, strength).weights;
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("identical views with uniform centrality are a renormalized fixed point") {
    for (const Matrix& w : {k2(), cycle(5), cycle(8)}) {
        const auto e = eigencentrality(ConnectivityMatrix(w));
        const StatusMatrix p1 = init_status(ConnectivityMatrix(w), e);
        std::vector<StatusMatrix> statuses{p1, p1, p1};
        const std::vector<CentralityDiag> es{e, e, e};
        const std::vector<double> targets(3, p1.values.sum());
        for (int u = 0; u < 20; ++u) {
            statuses = diffusion_step(statuses, es, targets);
            for (const auto& s : statuses) CHECK((s.values - p1.values).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}
