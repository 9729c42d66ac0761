#pragma once

#include "sparcode/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparcode {

// xoshiro256** 1.0 seeded by four successive splitmix64 outputs of `seed`.
// Doubles are (next() >> 11) * 2^-53, uniform on [0, 1).
class Xoshiro256StarStar {
public:
    static constexpr const char* name = "xoshiro256** (splitmix64 seeding, (x >> 11) * 2^-53 doubles)";

    explicit Xoshiro256StarStar(std::uint64_t seed);
    std::uint64_t next();
    double uniform();

private:
    std::array<std::uint64_t, 4> s_{};
};

// One block pair of the parameter table; no sigma means no edges at all.
struct BlockPair {
    double mu = 0.0;
    std::optional<double> sigma;
};

struct ScenarioSpec {
    std::string name = "custom";
    std::vector<Index> block_sizes;
    std::vector<std::vector<BlockPair>> pairs;  // square, symmetric
    std::uint64_t seed = 0;
    std::optional<std::size_t> outlier_block;  // 0-based

    Index size() const;
    std::size_t blocks() const { return block_sizes.size(); }
    // Throws SpecInvalid naming the offending field.
    void validate() const;
};

// Parameter tables for the two built-in benchmark graphs. Throws UnknownScenario.
ScenarioSpec builtin_scenario(const std::string& name, std::uint64_t seed);

// JSON object with block_sizes, mu and sigma (nested rows or a flat
// row-major list; null sigma for an absent block pair), and optional seed,
// name and outlier_block. Throws SpecInvalid.
ScenarioSpec parse_scenario_json(const std::string& text);
std::string scenario_json(const ScenarioSpec& spec);

struct GeneratedGraph {
    AffinityMatrix affinity;
    Labels labels;               // block id, 1-based
    std::vector<bool> outlier;   // vertex belongs to the outlier block
};

// w_ij = mu + r sigma for each unordered pair i < j in row-major order, one
// draw per pair (also for absent pairs, which stay exactly zero).
GeneratedGraph generate_scenario(const ScenarioSpec& spec);

}  // namespace sparcode
