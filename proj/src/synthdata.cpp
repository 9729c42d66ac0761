#include "sparcode/synthdata.hpp"

#include "sparcode/error.hpp"

#include <json.hpp>

#include <cmath>

namespace sparcode {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256StarStar::Xoshiro256StarStar(std::uint64_t seed) {
    for (auto& word : s_) word = splitmix64(seed);
}

std::uint64_t Xoshiro256StarStar::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256StarStar::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

Index ScenarioSpec::size() const {
    Index n = 0;
    for (Index b : block_sizes) n += b;
    return n;
}

void ScenarioSpec::validate() const {
    const auto b = block_sizes.size();
    if (b == 0) throw SpecInvalid("block_sizes: at least one block required");
    for (std::size_t i = 0; i < b; ++i)
        if (block_sizes[i] < 1) throw SpecInvalid("block_sizes[" + std::to_string(i) + "]: must be positive");
    if (size() < 2) throw SpecInvalid("block_sizes: need at least two vertices in total");
    if (pairs.size() != b) throw SpecInvalid("mu/sigma: table side must equal the number of blocks");
    for (std::size_t i = 0; i < b; ++i) {
        if (pairs[i].size() != b) throw SpecInvalid("mu/sigma: row " + std::to_string(i) + " has the wrong length");
        for (std::size_t j = 0; j < b; ++j) {
            const auto& p = pairs[i][j];
            const auto& q = pairs[j][i];
            const std::string where = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
            if (!std::isfinite(p.mu) || p.mu < 0.0) throw SpecInvalid("mu" + where + ": must be finite and >= 0");
            if (p.sigma && (!std::isfinite(*p.sigma) || *p.sigma < 0.0))
                throw SpecInvalid("sigma" + where + ": must be finite and >= 0");
            if (!p.sigma && p.mu != 0.0) throw SpecInvalid("sigma" + where + ": null sigma requires mu = 0");
            if (p.mu + p.sigma.value_or(0.0) > 1.0) throw SpecInvalid("mu+sigma" + where + ": exceeds 1");
            if (p.mu != q.mu || p.sigma != q.sigma) throw SpecInvalid("mu/sigma" + where + ": table is not symmetric");
        }
    }
    if (outlier_block && *outlier_block >= b) throw SpecInvalid("outlier_block: out of range");
}

ScenarioSpec builtin_scenario(const std::string& name, std::uint64_t seed) {
    constexpr double none = -1.0;  // table marker for an absent pair
    auto table = [](std::vector<std::vector<double>> mu, std::vector<std::vector<double>> sigma) {
        std::vector<std::vector<BlockPair>> pairs(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i)
            for (std::size_t j = 0; j < mu.size(); ++j) {
                BlockPair p{mu[i][j], std::nullopt};
                if (sigma[i][j] != none) p.sigma = sigma[i][j];
                pairs[i].push_back(p);
            }
        return pairs;
    };

    ScenarioSpec spec;
    spec.name = name;
    spec.seed = seed;
    if (name == "scenario1") {
        spec.block_sizes = {45, 40, 55, 42, 37, 46, 35};
        spec.pairs = table(
            {
                {0.8, 0.005, 0.35, 0, 0, 0.25, 0},
                {0.005, 0.7, 0, 0.35, 0.19, 0, 0},
                {0.35, 0, 0.9, 0, 0, 0, 0},
                {0, 0.35, 0, 0.85, 0, 0, 0},
                {0, 0.19, 0, 0, 0.79, 0, 0},
                {0.25, 0, 0, 0, 0, 0.85, 0},
                {0, 0, 0, 0, 0, 0, 0.95},
            },
            {
                {0.19, 0.0045, 0.1, none, none, 0.05, none},
                {0.0045, 0.1, none, 0.1, 0.15, none, none},
                {0.1, none, 0.09, none, none, none, none},
                {none, 0.1, none, 0.14, none, none, none},
                {none, 0.15, none, none, 0.15, none, none},
                {0.05, none, none, none, none, 0.14, none},
                {none, none, none, none, none, none, 0.04},
            });
    } else if (name == "scenario2") {
        spec.block_sizes = {66, 102, 90, 42};
        spec.pairs = table(
            {
                {0.7, 0.01, 0, 0.005},
                {0.01, 0.8, 0.27, 0.005},
                {0, 0.27, 0.7, 0.005},
                {0.005, 0.005, 0.005, 0.005},
            },
            {
                {0.29, 0.29, none, 0.025},
                {0.29, 0.19, 0.1, 0.025},
                {none, 0.1, 0.24, 0.025},
                {0.025, 0.025, 0.025, 0.025},
            });
        spec.outlier_block = 3;
    } else {
        throw UnknownScenario(name);
    }
    return spec;
}

namespace {

using nlohmann::json;

// Accepts [[...], [...]] or a flat list of side*side numbers.
std::vector<std::vector<json>> square_table(const json& j, std::size_t side, const std::string& key) {
    if (!j.is_array()) throw SpecInvalid(key + ": expected an array");
    std::vector<std::vector<json>> rows(side);
    if (!j.empty() && j.front().is_array()) {
        if (j.size() != side) throw SpecInvalid(key + ": expected " + std::to_string(side) + " rows");
        for (std::size_t i = 0; i < side; ++i) {
            if (!j[i].is_array() || j[i].size() != side)
                throw SpecInvalid(key + "[" + std::to_string(i) + "]: expected " + std::to_string(side) + " entries");
            for (const auto& v : j[i]) rows[i].push_back(v);
        }
    } else {
        if (j.size() != side * side)
            throw SpecInvalid(key + ": expected " + std::to_string(side * side) + " row-major entries");
        for (std::size_t i = 0; i < side; ++i)
            for (std::size_t c = 0; c < side; ++c) rows[i].push_back(j[i * side + c]);
    }
    return rows;
}

}  // namespace

ScenarioSpec parse_scenario_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecInvalid(std::string("scenario JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SpecInvalid("scenario JSON: expected an object");
    ScenarioSpec spec;
    try {
        if (!doc.contains("block_sizes")) throw SpecInvalid("block_sizes: missing");
        for (const auto& b : doc.at("block_sizes")) {
            if (!b.is_number_integer()) throw SpecInvalid("block_sizes: entries must be integers");
            spec.block_sizes.push_back(b.get<Index>());
        }
        const auto side = spec.block_sizes.size();
        if (!doc.contains("mu") || !doc.contains("sigma")) throw SpecInvalid("mu/sigma: missing");
        const auto mu = square_table(doc.at("mu"), side, "mu");
        const auto sigma = square_table(doc.at("sigma"), side, "sigma");
        spec.pairs.assign(side, {});
        for (std::size_t i = 0; i < side; ++i)
            for (std::size_t j = 0; j < side; ++j) {
                if (!mu[i][j].is_number()) throw SpecInvalid("mu[" + std::to_string(i) + "][" + std::to_string(j) + "]: not a number");
                BlockPair p{mu[i][j].get<double>(), std::nullopt};
                if (!sigma[i][j].is_null()) {
                    if (!sigma[i][j].is_number())
                        throw SpecInvalid("sigma[" + std::to_string(i) + "][" + std::to_string(j) + "]: not a number or null");
                    p.sigma = sigma[i][j].get<double>();
                }
                spec.pairs[i].push_back(p);
            }
        if (doc.contains("seed")) spec.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("name")) spec.name = doc.at("name").get<std::string>();
        if (doc.contains("outlier_block") && !doc.at("outlier_block").is_null())
            spec.outlier_block = doc.at("outlier_block").get<std::size_t>();
    } catch (const json::exception& e) {
        throw SpecInvalid(std::string("scenario JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

std::string scenario_json(const ScenarioSpec& spec) {
    json doc;
    doc["name"] = spec.name;
    doc["seed"] = spec.seed;
    doc["block_sizes"] = spec.block_sizes;
    json mu = json::array(), sigma = json::array();
    for (const auto& row : spec.pairs) {
        json mrow = json::array(), srow = json::array();
        for (const auto& p : row) {
            mrow.push_back(p.mu);
            srow.push_back(p.sigma ? json(*p.sigma) : json(nullptr));
        }
        mu.push_back(mrow);
        sigma.push_back(srow);
    }
    doc["mu"] = mu;
    doc["sigma"] = sigma;
    doc["outlier_block"] = spec.outlier_block ? json(*spec.outlier_block) : json(nullptr);
    return doc.dump(2);
}

GeneratedGraph generate_scenario(const ScenarioSpec& spec) {
    spec.validate();
    const Index n = spec.size();
    std::vector<std::size_t> block(static_cast<std::size_t>(n));
    GeneratedGraph out;
    out.labels.resize(static_cast<std::size_t>(n));
    out.outlier.resize(static_cast<std::size_t>(n));
    for (std::size_t b = 0, v = 0; b < spec.blocks(); ++b)
        for (Index c = 0; c < spec.block_sizes[b]; ++c, ++v) {
            block[v] = b;
            out.labels[v] = static_cast<int>(b) + 1;
            out.outlier[v] = spec.outlier_block && *spec.outlier_block == b;
        }

    Xoshiro256StarStar rng(spec.seed);
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            const double r = rng.uniform();
            const auto& p = spec.pairs[block[static_cast<std::size_t>(i)]][block[static_cast<std::size_t>(j)]];
            if (p.sigma) w(i, j) = p.mu + r * *p.sigma;
        }
    out.affinity = AffinityMatrix::from_upper(w);
    return out;
}

}  // namespace sparcode
