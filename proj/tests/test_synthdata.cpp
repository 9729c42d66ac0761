#include "sparcode/error.hpp"
#include "sparcode/synthdata.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace sparcode;

TEST_CASE("xoshiro256** reference stream") {
    // Seed 0 through splitmix64, checked against an independent implementation
    // of both published algorithms.
    Xoshiro256StarStar rng(0);
    const std::uint64_t first = rng.next();
    CHECK(first == 11091344671253066420ull);
    CHECK(rng.next() == 13793997310169335082ull);
    CHECK(rng.next() == 1900383378846508768ull);
    Xoshiro256StarStar again(0);
    CHECK(again.next() == first);
    Xoshiro256StarStar other(1);
    CHECK(other.next() != first);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("built-in scenario tables") {
    const auto s1 = builtin_scenario("scenario1", 1);
    CHECK(s1.size() == 300);
    CHECK(s1.blocks() == 7);
    CHECK(s1.block_sizes == std::vector<Index>{45, 40, 55, 42, 37, 46, 35});
    CHECK(s1.pairs[0][0].mu == 0.8);
    CHECK(*s1.pairs[0][0].sigma == 0.19);
    CHECK(s1.pairs[0][2].mu == 0.35);
    CHECK(*s1.pairs[0][2].sigma == 0.1);
    CHECK(s1.pairs[6][6].mu == 0.95);
    CHECK(*s1.pairs[6][6].sigma == 0.04);
    CHECK_FALSE(s1.outlier_block.has_value());

    const auto s2 = builtin_scenario("scenario2", 1);
    CHECK(s2.size() == 300);
    CHECK(s2.block_sizes == std::vector<Index>{66, 102, 90, 42});
    REQUIRE(s2.outlier_block.has_value());
    CHECK(*s2.outlier_block == 3);
    CHECK(s2.pairs[1][1].mu == 0.8);
    CHECK(*s2.pairs[1][1].sigma == 0.19);
    for (std::size_t b = 0; b < 4; ++b) {
        CHECK(s2.pairs[3][b].mu == 0.005);
        CHECK(*s2.pairs[3][b].sigma == 0.025);
    }
    CHECK_THROWS_AS(builtin_scenario("scenario3", 1), UnknownScenario);
}

TEST_CASE("generated scenarios keep the affinity invariants and stay in [0, 1)") {
    for (const char* name : {"scenario1", "scenario2"}) {
        const auto g = generate_scenario(builtin_scenario(name, 5));
        const Matrix& w = g.affinity.weights();
        CHECK(is_valid_affinity(w));
        CHECK(w.minCoeff() >= 0.0);
        CHECK(w.maxCoeff() < 1.0);
        CHECK(g.labels.size() == 300);
        std::set<int> distinct(g.labels.begin(), g.labels.end());
        CHECK(distinct.size() == (std::string(name) == "scenario1" ? 7u : 4u));
    }
    const auto g2 = generate_scenario(builtin_scenario("scenario2", 5));
    CHECK(std::count(g2.outlier.begin(), g2.outlier.end(), true) == 42);
}

TEST_CASE("fixed seed gives identical graphs, different seeds differ") {
    const auto a = generate_scenario(builtin_scenario("scenario1", 9));
    const auto b = generate_scenario(builtin_scenario("scenario1", 9));
    const auto c = generate_scenario(builtin_scenario("scenario1", 10));
    CHECK(a.affinity.weights() == b.affinity.weights());
    CHECK(a.affinity.weights() != c.affinity.weights());
}

TEST_CASE("zero spread reproduces the mean table blockwise") {
    ScenarioSpec spec;
    spec.block_sizes = {2, 3};
    spec.pairs = {{{0.5, 0.0}, {0.1, 0.0}}, {{0.1, 0.0}, {0.7, 0.0}}};
    const Matrix w = generate_scenario(spec).affinity.weights();
    CHECK(w(0, 1) == 0.5);
    CHECK(w(0, 3) == 0.1);
    CHECK(w(2, 4) == 0.7);
    CHECK(w(4, 2) == 0.7);
    CHECK(w(3, 3) == 0.0);
}

TEST_CASE("an absent block pair stays exactly zero") {
    ScenarioSpec spec;
    spec.block_sizes = {3, 3};
    spec.pairs = {{{0.5, 0.1}, {0.0, std::nullopt}}, {{0.0, std::nullopt}, {0.5, 0.1}}};
    const Matrix w = generate_scenario(spec).affinity.weights();
    CHECK(w.block(0, 3, 3, 3).isZero(0.0));
    CHECK(w(0, 1) > 0.0);
}

TEST_CASE("empirical block means approach mu + sigma/2") {
    const auto spec = builtin_scenario("scenario1", 3);
    const auto g = generate_scenario(spec);
    const Matrix& w = g.affinity.weights();
    std::vector<Index> start{0};
    for (Index s : spec.block_sizes) start.push_back(start.back() + s);
    for (std::size_t a = 0; a < spec.blocks(); ++a)
        for (std::size_t b = a; b < spec.blocks(); ++b) {
            const auto& pair = spec.pairs[a][b];
            if (!pair.sigma || *pair.sigma == 0.0) continue;
            double sum = 0.0;
            std::size_t count = 0;
            for (Index i = start[a]; i < start[a + 1]; ++i)
                for (Index j = start[b]; j < start[b + 1]; ++j)
                    if (i < j) sum += w(i, j), ++count;
            const double se = *pair.sigma / std::sqrt(12.0 * static_cast<double>(count));
            CHECK(std::abs(sum / static_cast<double>(count) - (pair.mu + *pair.sigma / 2.0)) <= 3.0 * se);
        }
}

TEST_CASE("scenario JSON parsing and validation") {
    const auto spec = parse_scenario_json(R"({"block_sizes": [2, 2], "mu": [[0.5, 0.0], [0.0, 0.6]],
                                              "sigma": [0.1, null, null, 0.1], "seed": 4})");
    CHECK(spec.size() == 4);
    CHECK(spec.seed == 4);
    CHECK_FALSE(spec.pairs[0][1].sigma.has_value());
    CHECK(parse_scenario_json(scenario_json(spec)).pairs[1][1].mu == 0.6);

    CHECK_THROWS_AS(parse_scenario_json("{"), SpecInvalid);
    // An absent pair carries no weight, so it cannot have a nonzero mean.
    CHECK_THROWS_AS(parse_scenario_json(R"({"block_sizes": [2, 2], "mu": [[0.5, 0.1], [0.1, 0.6]],
                                            "sigma": [[0.1, null], [null, 0.1]]})"),
                    SpecInvalid);
    CHECK_THROWS_AS(parse_scenario_json(R"({"block_sizes": [2], "mu": [[0.9]], "sigma": [[0.2]]})"), SpecInvalid);
    CHECK_THROWS_AS(parse_scenario_json(R"({"block_sizes": [2, 2], "mu": [[0.5]], "sigma": [[0.1]]})"), SpecInvalid);
    CHECK_THROWS_AS(parse_scenario_json(R"({"block_sizes": [2], "mu": [[0.5]], "sigma": [[-0.1]]})"), SpecInvalid);
}
