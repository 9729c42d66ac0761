#include "sparcode/affinity.hpp"
#include "sparcode/error.hpp"
#include "sparcode/io.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace sparcode;

namespace {

DataMatrix columns(std::initializer_list<std::initializer_list<double>> cols) {
    const auto n = static_cast<Index>(cols.size());
    const auto m = static_cast<Index>(cols.begin()->size());
    DataMatrix d;
    d.values.resize(m, n);
    Index j = 0;
    for (const auto& c : cols) {
        Index i = 0;
        for (double v : c) d.values(i++, j) = v;
        ++j;
    }
    return d;
}

std::filesystem::path temp_file(const std::string& name, const std::string& contents) {
    const auto path = std::filesystem::temp_directory_path() / ("sparcode_test_" + name);
    std::ofstream(path) << contents;
    return path;
}

DataMatrix gaussian_data(Index m, Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    DataMatrix d;
    d.values.resize(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) d.values(i, j) = g(rng);
    return d;
}

}  // namespace

TEST_CASE("cosine of identical, orthogonal and 45-degree vectors") {
    CHECK(cosine_affinity(columns({{1, 2, 3}, {1, 2, 3}})).weights()(0, 1) == doctest::Approx(1.0));
    CHECK(cosine_affinity(columns({{1, 0}, {0, 1}})).weights()(0, 1) == 0.0);
    CHECK(cosine_affinity(columns({{1, 0}, {1, 1}})).weights()(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("cosine rejects a zero column") {
    CHECK_THROWS_AS(cosine_affinity(columns({{1, 2}, {0, 0}, {3, 1}})), ZeroNormColumn);
}

TEST_CASE("pearson of linear relations and a permutation") {
    CHECK(pearson_affinity(columns({{1, 2, 4}, {3, 5, 9}})).weights()(0, 1) == doctest::Approx(1.0));
    CHECK(pearson_affinity(columns({{1, 2, 4}, {-1, -2, -4}})).weights()(0, 1) == doctest::Approx(-1.0));
    CHECK(pearson_affinity(columns({{1, 2, 3}, {1, 3, 2}})).weights()(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(pearson_affinity(columns({{1, 2, 3}, {2, 2, 2}})), ConstantColumn);
}

TEST_CASE("affinity constructors keep the matrix invariants on random input") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = gaussian_data(6, 9, rng);
        for (const auto& a : {cosine_affinity(d), pearson_affinity(d), cosine_affinity(d, Execution::serial)}) {
            const Matrix& w = a.weights();
            CHECK(is_valid_affinity(w));
            CHECK(w.maxCoeff() <= 1.0);
            CHECK(w.minCoeff() >= -1.0);
        }
        // Serial and parallel paths agree bit for bit.
        CHECK(cosine_affinity(d, Execution::serial).weights() == cosine_affinity(d, Execution::parallel).weights());
        CHECK(pearson_affinity(d, Execution::serial).weights() == pearson_affinity(d, Execution::parallel).weights());
    }
}

TEST_CASE("AffinityMatrix construction checks") {
    Matrix w = Matrix::Zero(2, 2);
    w(0, 1) = 1.0;
    CHECK_THROWS_AS(AffinityMatrix{w}, AsymmetryError);
    CHECK(AffinityMatrix::from_upper(w).weights()(1, 0) == 1.0);
    w(1, 0) = 1.0;
    w(0, 0) = 0.5;
    CHECK_THROWS_AS(AffinityMatrix{w}, InvalidArgument);
}

TEST_CASE("sparse representation: duplicate columns represent each other") {
    const auto r = sparse_representation_affinity(columns({{1, 2, 0.5}, {1, 2, 0.5}}));
    CHECK(r.coefficients.coefficients(0, 1) > 0.0);
    CHECK(r.affinity.weights()(0, 1) > 0.0);
    CHECK(r.coefficients.coefficients(0, 0) == 0.0);
}

TEST_CASE("sparse representation: orthogonal columns under a weak fit term give nothing") {
    SparseRepresentationOptions opts;
    opts.lambda = 1e-3;
    const auto r = sparse_representation_affinity(columns({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}}), opts);
    CHECK(r.affinity.weights().isZero(0.0));
}

TEST_CASE("sparse representation matches a grid search of the column objective") {
    // x3 = (x1 + x2) / 2 with x1, x2 orthonormal; with a strong fit term the
    // lasso shrinks each coefficient by 1/lambda.
    const auto d = columns({{1, 0, 0, 0}, {0, 1, 0, 0}, {0.5, 0.5, 0, 0}});
    SparseRepresentationOptions opts;
    opts.lambda = 200.0;
    const auto r = sparse_representation_affinity(d, opts);
    const Vector a = r.coefficients.coefficients.col(2);

    const auto objective = [&](double a0, double a1) {
        const Vector fit = d.values.col(2) - a0 * d.values.col(0) - a1 * d.values.col(1);
        return std::abs(a0) + std::abs(a1) + 0.5 * *opts.lambda * fit.squaredNorm();
    };
    double best = objective(0, 0), b0 = 0, b1 = 0;
    for (double a0 = 0.0; a0 <= 1.0; a0 += 0.0005)
        for (double a1 = 0.0; a1 <= 1.0; a1 += 0.0005)
            if (const double f = objective(a0, a1); f < best) best = f, b0 = a0, b1 = a1;
    CHECK(a[0] == doctest::Approx(b0).epsilon(2e-3));
    CHECK(a[1] == doctest::Approx(b1).epsilon(2e-3));
    CHECK(a[0] == doctest::Approx(0.5).epsilon(0.02));
    CHECK(a[2] == 0.0);
}

TEST_CASE("sparse representation objective never increases between passes") {
    std::mt19937_64 rng(5);
    SparseRepresentationOptions opts;
    opts.record_objective = true;
    const auto r = sparse_representation_affinity(gaussian_data(8, 12, rng), opts);
    for (const auto& trace : r.coefficients.objective_traces)
        for (std::size_t t = 1; t < trace.size(); ++t) CHECK(trace[t] <= trace[t - 1] + 1e-12);
    CHECK_THROWS_AS(([&] {
                        SparseRepresentationOptions bad;
                        bad.lambda = -1.0;
                        sparse_representation_affinity(gaussian_data(3, 4, rng), bad);
                    }()),
                    InvalidArgument);
}

TEST_CASE("feature CSV loading") {
    io::FeatureCsvOptions as_matrix;
    as_matrix.observations_in_rows = false;
    const auto d = io::load_features(temp_file("ok.csv", "1,2\n3,4\n5,6\n"), as_matrix);
    CHECK(d.features() == 3);
    CHECK(d.observations() == 2);
    const auto t = io::load_features(temp_file("ok.csv", "1,2\n3,4\n5,6\n"));
    CHECK(t.observations() == 3);
    CHECK(t.values(1, 2) == 6.0);

    CHECK_THROWS_AS(io::load_features(temp_file("ragged.csv", "1,2\n3\n")), ParseError);
    CHECK_THROWS_AS(io::load_features(temp_file("text.csv", "1,x\n3,4\n")), ParseError);
    CHECK_THROWS_AS(io::load_features(temp_file("empty.csv", "")), DimensionMismatch);
}

TEST_CASE("edge list loading mirrors edges and drops self-loops") {
    io::AdjacencyOptions opts;
    opts.nodes = 3;
    auto r = io::load_adjacency(temp_file("e.edges", "1 2 1.0\n"), opts);
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 1) = expected(1, 0) = 1.0;
    CHECK(r.affinity.weights() == expected);

    r = io::load_adjacency(temp_file("loop.edges", "# comment\n1 1 0.3\n1 2\n"));
    CHECK(r.self_loops_dropped == 1);
    CHECK(r.affinity.weights()(0, 0) == 0.0);
    CHECK(r.affinity.weights()(0, 1) == 1.0);

    CHECK_THROWS_AS(io::load_adjacency(temp_file("conflict.edges", "1 2 1\n2 1 0.5\n")), AsymmetryError);
    CHECK_THROWS_AS(io::load_adjacency(temp_file("bad.edges", "1 two\n")), ParseError);
}

TEST_CASE("dense adjacency: asymmetry is rejected and a round trip is bit-exact") {
    io::AdjacencyOptions dense;
    dense.format = io::AdjacencyFormat::dense_matrix;
    CHECK_THROWS_AS(io::load_adjacency(temp_file("asym.csv", "0,1\n0.5,0\n"), dense), AsymmetryError);

    std::mt19937_64 rng(3);
    const Matrix w = testing::random_symmetric_weights(7, rng, 0.6) / 3.0;
    const auto first = io::load_adjacency(temp_file("rt.csv", io::dense_csv(w)), dense);
    CHECK(first.affinity.weights() == w);
    const auto text = io::dense_csv(first.affinity.weights());
    CHECK(io::dense_csv(io::load_adjacency(temp_file("rt2.csv", text), dense).affinity.weights()) == text);
}
