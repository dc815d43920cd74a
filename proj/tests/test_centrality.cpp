#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "mgprof/centrality.hpp"
#include "mgprof/errors.hpp"
#include "oracles.hpp"

using namespace mgp;

namespace {

Matrix path3() {
    Matrix w(3, 3);
    w << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    return w;
}

Matrix star4() {
    Matrix w = Matrix::Zero(4, 4);
    for (int i = 1; i < 4; ++i) w(0, i) = w(i, 0) = 1.0;
    return w;
}

}  // namespace

TEST_CASE("eigencentrality closed forms") {
    const auto p3 = eigencentrality(ConnectivityMatrix(path3()));
    CHECK(p3.values[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p3.values[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    CHECK(p3.values[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(*p3.spectral_radius == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));

    Matrix k2(2, 2);
    k2 << 0, 1, 1, 0;
    const auto e2 = eigencentrality(ConnectivityMatrix(k2));
    CHECK(e2.values[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(e2.values[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(*e2.spectral_radius == doctest::Approx(1.0).epsilon(1e-12));

    const auto st = eigencentrality(ConnectivityMatrix(star4()));
    CHECK(st.values[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
    for (int i = 1; i < 4; ++i) CHECK(st.values[i] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-9));
    CHECK(*st.spectral_radius == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK(st.floored_count == 0);
}

TEST_CASE("strength centrality") {
    Matrix k2(2, 2);
    k2 << 0, 3, 3, 0;
    const auto s2 = strength_centrality(ConnectivityMatrix(k2));
    CHECK(s2.values[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(s2.values[1] == doctest::Approx(std::sqrt(0.5)));
    CHECK_FALSE(s2.spectral_radius.has_value());

    const auto s3 = strength_centrality(ConnectivityMatrix(path3()));
    CHECK(s3.values[0] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(s3.values[1] == doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(s3.kind == CentralityKind::Strength);
}

TEST_CASE("all-zero matrices are rejected") {
    const ConnectivityMatrix zero(Matrix::Zero(3, 3));
    CHECK_THROWS_AS(eigencentrality(zero), DataError);
    CHECK_THROWS_AS(strength_centrality(zero), DataError);
}

TEST_CASE("non-convergence is reported") {
    std::mt19937_64 rng(1);
    const ConnectivityMatrix w(oracle::random_connected_graph(12, rng));
    CHECK_THROWS_AS(eigencentrality(w, {1e-10, 2}), NumericalError);
}

TEST_CASE("near-degenerate top eigenvalue is accepted and flagged") {
    // Two disjoint triangles whose spectral radii differ by 1e-9 relative.
    Matrix w = Matrix::Zero(6, 6);
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) w(3 * b + i, 3 * b + j) = b == 0 ? 1.0 : 1.0 + 1e-9;
    const auto e = eigencentrality(ConnectivityMatrix(w));
    CHECK(e.slow_convergence);
    CHECK(e.iterations == 10000);
    CHECK(e.values.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int b = 0; b < 2; ++b) {
        CHECK(e.values[3 * b] == doctest::Approx(e.values[3 * b + 1]).epsilon(1e-12));
        CHECK(e.values[3 * b] == doctest::Approx(e.values[3 * b + 2]).epsilon(1e-12));
    }
    CHECK(*e.spectral_radius == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("flooring raises isolated nodes to 1e-8 of the maximum") {
    Matrix w = Matrix::Zero(4, 4);
    w(0, 1) = w(1, 0) = 1.0;
    w(1, 2) = w(2, 1) = 1.0;  // node 3 isolated
    const auto e = eigencentrality(ConnectivityMatrix(w));
    CHECK(e.floored_count == 1);
    CHECK(e.values[3] == doctest::Approx(1e-8 * e.values.maxCoeff()).epsilon(1e-12));
    CHECK((e.values.array() > 0.0).all());

    const auto s = strength_centrality(ConnectivityMatrix(w));
    CHECK(s.floored_count == 1);
}

TEST_CASE("power iteration matches the dense eigensolver") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + trial % 18;
        const Matrix w = oracle::random_connected_graph(n, rng);
        const auto e = eigencentrality(ConnectivityMatrix(w));
        Eigen::SelfAdjointEigenSolver<Matrix> dense(w);
        Vector v = dense.eigenvectors().col(n - 1);
        if (v.sum() < 0) v = -v;
        CHECK((e.values - v).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(*e.spectral_radius == doctest::Approx(dense.eigenvalues()[n - 1]).epsilon(1e-10));
        CHECK(e.values.norm() == doctest::Approx(1.0).epsilon(1e-12));

        // Perron-Frobenius bounds.
        const double max_row = w.rowwise().sum().maxCoeff();
        CHECK(*e.spectral_radius <= max_row + 1e-12);
        CHECK(*e.spectral_radius >= max_row / n - 1e-12);
    }
}

TEST_CASE("eigencentrality is permutation-equivariant and scale-invariant") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + trial;
        const Matrix w = oracle::random_connected_graph(n, rng);
        const auto perm = oracle::random_permutation(n, rng);
        const Matrix pw = perm * w * perm.transpose();
        const auto e = eigencentrality(ConnectivityMatrix(w));
        const auto ep = eigencentrality(ConnectivityMatrix(pw));
        CHECK((ep.values - perm * e.values).cwiseAbs().maxCoeff() <= 1e-8);

        for (double c : {0.01, 7.5}) {
            const auto es = eigencentrality(ConnectivityMatrix(Matrix(c * w)));
            CHECK((es.values - e.values).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK(*es.spectral_radius == doctest::Approx(c * *e.spectral_radius).epsilon(1e-10));
        }
    }
}

TEST_CASE("bipartite graphs converge despite the -psi eigenvalue") {
    // Even cycle: spectrum symmetric about zero.
    Matrix c6 = Matrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) c6(i, (i + 1) % 6) = c6((i + 1) % 6, i) = 1.0;
    const auto e = eigencentrality(ConnectivityMatrix(c6));
    for (int i = 0; i < 6; ++i) CHECK(e.values[i] == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-10));
    CHECK(*e.spectral_radius == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("centrality kind names round-trip") {
    CHECK(parse_centrality_kind("eigen") == CentralityKind::Eigen);
    CHECK(parse_centrality_kind(to_string(CentralityKind::Strength)) == CentralityKind::Strength);
    CHECK_THROWS_AS(parse_centrality_kind("pagerank"), ConfigError);
}
