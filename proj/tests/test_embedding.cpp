#include "sparcode/embedding.hpp"
#include "sparcode/error.hpp"

#include "support.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <random>

using namespace sparcode;

namespace {

// Second generalized eigenvector of (D - W) y = lambda D y, y'Dy = 1.
Vector reference_fiedler(const Matrix& w) {
    const Vector d = w.rowwise().sum();
    const Matrix l = Matrix(d.asDiagonal()) - w;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(l, Matrix(d.asDiagonal()));
    Vector y = es.eigenvectors().col(1);
    y /= std::sqrt(y.dot(d.cwiseProduct(y)));
    return testing::sign_normalized(y);
}

Matrix two_cliques(Index a, Index b) {
    Matrix w = Matrix::Zero(a + b, a + b);
    w.topLeftCorner(a, a).setOnes();
    w.bottomRightCorner(b, b).setOnes();
    w.diagonal().setZero();
    return w;
}

}  // namespace

TEST_CASE("3-vertex path matches the dense generalized reference") {
    Matrix w(3, 3);
    w << 0, 1, 0,
         1, 0, 1,
         0, 1, 0;
    const auto e = fiedler_embedding(w);
    CHECK((e.y - reference_fiedler(w)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(e.eigenvalue == doctest::Approx(1.0));
    CHECK(e.norm_residual <= 1e-8);
    CHECK(e.balance_residual <= 1e-8);
}

TEST_CASE("random connected graphs match the dense generalized reference") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 40; ++rep) {
        const Index n = 4 + rep;
        const Matrix w = testing::random_connected_graph(n, rng, 0.25);
        const auto e = fiedler_embedding(w);
        CHECK((e.y - reference_fiedler(w)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(e.norm_residual <= 1e-8);
        CHECK(e.balance_residual <= 1e-8);
    }
}

TEST_CASE("sparse shift-invert path agrees with the dense path") {
    std::mt19937_64 rng(5);
    const Matrix w = testing::random_connected_graph(120, rng, 0.05);
    FiedlerOptions iterative;
    iterative.dense_limit = 10;
    const auto dense = fiedler_embedding(w);
    const auto sparse = fiedler_embedding(w, iterative);
    CHECK((dense.y - sparse.y).cwiseAbs().maxCoeff() <= 1e-7);
    CHECK(sparse.eigenvalue == doctest::Approx(dense.eigenvalue).epsilon(1e-9));
}

TEST_CASE("two disconnected cliques: zero eigenvalue, piecewise constant, opposite signs") {
    const Matrix w = two_cliques(4, 6);
    const auto e = fiedler_embedding(w);
    CHECK(std::abs(e.eigenvalue) <= 1e-10);
    for (Index i = 1; i < 4; ++i) CHECK(e.y[i] == doctest::Approx(e.y[0]).epsilon(1e-10));
    for (Index i = 5; i < 10; ++i) CHECK(e.y[i] == doctest::Approx(e.y[4]).epsilon(1e-10));
    CHECK(e.y[0] * e.y[4] < 0.0);
    CHECK(e.norm_residual <= 1e-8);
}

TEST_CASE("repeated eigenvalue: the result does not depend on the solver basis") {
    // Three components make lambda_2 = 0 a double eigenvalue; the dense and
    // iterative backends return different bases but the same embedding.
    Matrix w = Matrix::Zero(12, 12);
    w.block(0, 0, 3, 3).setConstant(1.0);
    w.block(3, 3, 4, 4).setConstant(1.1);
    w.block(7, 7, 5, 5).setConstant(1.2);
    w.diagonal().setZero();
    FiedlerOptions iterative;
    iterative.dense_limit = 2;
    const auto a = fiedler_embedding(w);
    const auto b = fiedler_embedding(w, iterative);
    CHECK(a.multiplicity == 2);
    CHECK((a.y - b.y).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("uniform rescaling only rescales the embedding by 1/sqrt(c)") {
    std::mt19937_64 rng(21);
    const Matrix w = testing::random_connected_graph(15, rng);
    const auto base = fiedler_embedding(w);
    for (double c : {0.01, 3.0, 250.0}) {
        const auto scaled = fiedler_embedding(Matrix(c * w));
        CHECK((scaled.y * std::sqrt(c) - base.y).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(scaled.eigenvalue == doctest::Approx(base.eigenvalue));
    }
}

TEST_CASE("fiedler embedding input checks") {
    Matrix w = two_cliques(3, 3);
    w.row(0).setZero();
    w.col(0).setZero();
    CHECK_THROWS_AS(fiedler_embedding(w), IsolatedVertex);
    CHECK_THROWS_AS(fiedler_embedding(Matrix(Matrix::Zero(1, 1))), InvalidArgument);
}

TEST_CASE("split at zero is inclusive on the lower side") {
    Vector y(3);
    y << -1, -0.1, 0.2;
    auto s = split_fiedler(y);
    CHECK(s.lower == std::vector<Index>{0, 1});
    CHECK(s.upper == std::vector<Index>{2});

    y << 1, 2, 3;
    s = split_fiedler(y);
    CHECK(s.lower.empty());
    CHECK(s.upper.size() == 3);

    y << 0.0, 1, -1;
    CHECK(split_fiedler(y).lower == std::vector<Index>{0, 2});
}

TEST_CASE("polarization score arithmetic") {
    Vector y(4);
    y << -0.5, -0.5, 0.5, 0.5;
    CHECK(polarization(y).score == doctest::Approx(1.0));

    y << 1, 2, 3, 4;
    CHECK(polarization(y).score == 0.0);
    CHECK(polarization(y).degenerate);

    Vector z(6);
    z << -3, -1, -1, 2, 2, 5;
    const auto p = polarization(z);
    CHECK(p.score == doctest::Approx(3.0));
    CHECK(p.signed_score == doctest::Approx(-3.0));

    CHECK(median({4, 1, 3, 2}) == 2.5);
}

TEST_CASE("polarization is non-negative and zero exactly when a side is empty or medians coincide") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int rep = 0; rep < 200; ++rep) {
        Vector y(2 + rep % 9);
        for (Index i = 0; i < y.size(); ++i) y[i] = g(rng);
        const auto p = polarization(y);
        CHECK(p.score >= 0.0);
        const auto s = split_fiedler(y);
        if (s.lower.empty() || s.upper.empty()) CHECK(p.score == 0.0);
        else CHECK(p.score > 0.0);
    }
}

TEST_CASE("penalty search recovers the peak of a concave profile") {
    const auto concave = [](double rho) {
        Polarization p;
        p.score = 1.0 - (rho - 0.5) * (rho - 0.5);
        return p;
    };
    const auto r = select_penalty(concave, PenaltySearchConfig{});
    CHECK(r.rho_hat == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(r.rho_hat - 0.5) <= 0.01);
    CHECK(r.rho_hat >= r.refined_min);
    CHECK(r.rho_hat <= r.refined_max);

    // The spline interpolates the grid, so its peak is at least the best grid score.
    double best = 0.0;
    for (const auto& s : r.scores)
        if (s.pass == 1) best = std::max(best, s.score);
    CHECK(r.spline_peak >= best - 1e-9);
}

TEST_CASE("penalty search: constant profile picks the middle, all-zero throws") {
    const auto constant = [](double) {
        Polarization p;
        p.score = 0.7;
        return p;
    };
    const auto r = select_penalty(constant, PenaltySearchConfig{});
    CHECK(r.rho_hat == doctest::Approx(0.5 * (r.refined_min + r.refined_max)));

    CHECK_THROWS_AS(select_penalty([](double) { return Polarization{}; }, PenaltySearchConfig{}), AllScoresZero);
}

TEST_CASE("penalty search grid layout and config checks") {
    std::vector<double> seen;
    const auto record = [&](double rho) {
        Polarization p;
        p.score = rho < 0.4 ? rho : 0.8 - rho;  // peak at 0.4
        return p;
    };
    const auto r = select_penalty(record, PenaltySearchConfig{}, false);
    std::vector<double> coarse;
    for (const auto& s : r.scores)
        if (s.pass == 0) coarse.push_back(s.rho);
    REQUIRE(coarse.size() == 5);
    CHECK(coarse.front() == doctest::Approx(0.1));
    CHECK(coarse.back() == doctest::Approx(0.99));
    // Coarse maximizer 0.3225 -> refined between its neighbours 0.1 and 0.545.
    CHECK(r.refined_min == doctest::Approx(0.1));
    CHECK(r.refined_max == doctest::Approx(0.545));

    PenaltySearchConfig bad;
    bad.rho_min0 = 0.5;
    bad.rho_max0 = 0.4;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad = {};
    bad.n_rho = 2;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("penalty search is deterministic and parallel-invariant") {
    const auto bumpy = [](double rho) {
        Polarization p;
        p.score = std::sin(9.0 * rho) + 1.5;
        return p;
    };
    const auto a = select_penalty(bumpy, PenaltySearchConfig{}, true);
    const auto b = select_penalty(bumpy, PenaltySearchConfig{}, false);
    CHECK(a.rho_hat == b.rho_hat);
    CHECK(a.spline_peak == b.spline_peak);
}

TEST_CASE("natural cubic spline interpolates and is linear at the ends") {
    const NaturalCubicSpline s({0, 1, 2, 3}, {0, 1, 4, 9});
    CHECK(s(0.0) == doctest::Approx(0.0));
    CHECK(s(2.0) == doctest::Approx(4.0));
    CHECK(s(3.0) == doctest::Approx(9.0));
    const NaturalCubicSpline line({0, 1, 2}, {1, 3, 5});
    CHECK(line(1.5) == doctest::Approx(4.0));
    CHECK_THROWS(NaturalCubicSpline({0, 1}, {0, 1}));
}
