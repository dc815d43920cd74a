#include <doctest.h>

#include <random>

#include "mgprof/errors.hpp"
#include "mgprof/sparsifier.hpp"

using namespace mgp;

namespace {

// 3-node matrix whose strict upper triangle is (a, b, c) in row-major order.
ConnectivityMatrix upper3(double a, double b, double c) {
    Matrix w = Matrix::Zero(3, 3);
    w(0, 1) = w(1, 0) = a;
    w(0, 2) = w(2, 0) = b;
    w(1, 2) = w(2, 1) = c;
    return ConnectivityMatrix(w);
}

Population two_view_population(std::vector<ConnectivityMatrix> views0) {
    Population pop;
    pop.state_label = "s";
    pop.view_names = {"a", "b"};
    int id = 0;
    for (auto& v : views0) {
        pop.subjects.push_back({"s" + std::to_string(id++), {v, v}});
    }
    return pop;
}

Population random_population(std::uint64_t seed, int subjects, int n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(1.0, 0.5);
    std::vector<ConnectivityMatrix> views;
    for (int s = 0; s < subjects; ++s) {
        Matrix w = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = std::max(0.0, noise(rng));
        views.emplace_back(w);
    }
    return two_view_population(views);
}

}  // namespace

TEST_CASE("view_statistics pools upper triangles across subjects") {
    const Population pop = two_view_population({upper3(1, 2, 3), upper3(3, 4, 5)});
    const ViewStatistics st = view_statistics(pop, 0);
    CHECK(st.mu == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(st.sigma == doctest::Approx(1.2909944487358056).epsilon(1e-10));

    const ViewStatistics sample = view_statistics(pop, 0, StddevMode::Sample);
    CHECK(sample.sigma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));  // 10 / 5

    const Population single = two_view_population({upper3(0, 0, 6)});
    const ViewStatistics s1 = view_statistics(single, 1);
    CHECK(s1.mu == doctest::Approx(2.0));
    CHECK(s1.sigma == doctest::Approx(2.8284271247461903).epsilon(1e-10));

    const Population constant = two_view_population({upper3(4, 4, 4), upper3(4, 4, 4)});
    CHECK(view_statistics(constant, 0).sigma == 0.0);
    CHECK(view_statistics(constant, 0).mu == 4.0);
}

TEST_CASE("view_statistics errors") {
    Population empty;
    empty.view_names = {"a", "b"};
    CHECK_THROWS_AS(view_statistics(empty, 0), DataError);
    const Population pop = two_view_population({upper3(1, 2, 3)});
    CHECK_THROWS_AS(view_statistics(pop, 2), ConfigError);
}

TEST_CASE("sparsify_matrix keeps strictly larger entries") {
    Matrix w(3, 3);
    w << 0, 1, 5, 1, 0, 2, 5, 2, 0;
    const ConnectivityMatrix in(w);
    Matrix expected(3, 3);
    expected << 0, 0, 5, 0, 0, 0, 5, 0, 0;
    CHECK(sparsify_matrix(in, 2.0).weights == expected);
    CHECK(sparsify_matrix(in, -1.0).weights == w);
    CHECK(sparsify_matrix(in, 5.0).weights == Matrix::Zero(3, 3));
}

TEST_CASE("constant view vanishes at any nonnegative alpha") {
    const Population pop = two_view_population({upper3(2, 2, 2), upper3(2, 2, 2)});
    for (double alpha : {0.0, 1.0, 3.0}) {
        const Population sp = sparsify_population(pop, alpha);
        for (const auto& g : sp.subjects) CHECK(g.views[0].weights.isZero(0.0));
    }
}

TEST_CASE("sparsify_population thresholds each view at its own statistics") {
    Population pop = two_view_population({upper3(1, 2, 3), upper3(3, 4, 5)});
    // Make view 1 differ so its threshold differs.
    for (auto& g : pop.subjects) g.views[1].weights *= 10.0;
    const Population sp = sparsify_population(pop, 1.0);
    const double rho0 = 3.0 + 1.2909944487358056;
    const double rho1 = 10.0 * rho0;
    for (std::size_t s = 0; s < pop.subjects.size(); ++s) {
        CHECK(sp.subjects[s].views[0].weights == sparsify_matrix(pop.subjects[s].views[0], rho0).weights);
        CHECK(sp.subjects[s].views[1].weights == sparsify_matrix(pop.subjects[s].views[1], rho1).weights);
    }
}

TEST_CASE("alpha = 0 keeps roughly half of Gaussian entries") {
    const Population pop = random_population(3, 20, 15);
    const Population sp = sparsify_population(pop, 0.0);
    long kept = 0, total = 0;
    for (const auto& g : sp.subjects) {
        kept += (g.views[0].weights.array() > 0.0).count() / 2;
        total += 15 * 14 / 2;
    }
    const double frac = static_cast<double>(kept) / static_cast<double>(total);
    MESSAGE("fraction kept at alpha=0: " << frac);
    CHECK(frac > 0.3);
    CHECK(frac < 0.7);
}

TEST_CASE("sparsification properties on random populations") {
    const std::vector<double> grid{1.0, 1.4, 1.8, 2.2, 2.6, 3.0};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Population pop = random_population(seed, 5, 8);
        const SparsificationGrid g = make_grid(pop, grid);

        // Thresholds agree with a scalar recomputation over the pooled values.
        std::vector<double> pool;
        for (const auto& s : pop.subjects)
            for (int i = 0; i < 8; ++i)
                for (int j = i + 1; j < 8; ++j) pool.push_back(s.views[0].weights(i, j));
        double mean = 0.0;
        for (double v : pool) mean += v;
        mean /= static_cast<double>(pool.size());
        double var = 0.0;
        for (double v : pool) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(pool.size()));
        for (std::size_t j = 0; j < grid.size(); ++j)
            CHECK(std::abs(g.thresholds[0][j] - (mean + grid[j] * sd)) <= 1e-12);

        const ConnectivityMatrix& w = pop.subjects[0].views[0];
        Matrix prev = w.weights;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const ConnectivityMatrix once = sparsify_matrix(w, g.thresholds[0][j]);
            CHECK(sparsify_matrix(once, g.thresholds[0][j]).weights == once.weights);
            // Survivors at a higher threshold are a subset of the previous survivors.
            CHECK(((once.weights.array() > 0.0) && (prev.array() == 0.0)).count() == 0);
            CHECK(once.weights == once.weights.transpose());
            CHECK(once.weights.diagonal().isZero(0.0));
            CHECK((once.weights.array() >= 0.0).all());
            prev = once.weights;
        }
    }
}

TEST_CASE("make_grid rejects non-increasing alphas") {
    const Population pop = two_view_population({upper3(1, 2, 3)});
    const std::vector<double> bad{1.0, 1.0};
    CHECK_THROWS_AS(make_grid(pop, bad), ConfigError);
    const std::vector<double> none;
    CHECK_THROWS_AS(make_grid(pop, none), ConfigError);
}
