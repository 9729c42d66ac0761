#pragma once

#include "sparcode/affinity.hpp"
#include "sparcode/embedding.hpp"
#include "sparcode/partition.hpp"
#include "sparcode/robust_graph.hpp"
#include "sparcode/sparse_precision.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sparcode {

enum class Similarity { cosine, pearson, sparse_rep, precomputed };

Similarity parse_similarity(std::string_view name);
std::string to_string(Similarity s);

struct PipelineConfig {
    Similarity similarity = Similarity::precomputed;
    SparseRepresentationOptions sparse_rep;
    CovarianceScaling scaling = CovarianceScaling::correlation;
    PenaltySearchConfig penalty;
    GlassoOptions glasso;
    GmmOptions gmm;
    bool robust = true;
    bool parallel = true;
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidArgument
};

// Affinity from features for the cosine, pearson and sparse_rep modes.
AffinityMatrix build_affinity(const DataMatrix& data, const PipelineConfig& config);

struct StageTime {
    std::string stage;
    double seconds = 0.0;
};

struct DetectionResult {
    Index n = 0;
    PenaltySearchResult penalty;
    int glasso_iterations = 0;
    bool glasso_converged = false;
    double glasso_dual_gap = 0.0;
    Vector u;
    std::optional<GmmFit> gmm;
    std::string pruning_note;  // why the fitted threshold was not used, if it was not
    RobustGraph graph;
    DegreeProfile profile;
    PartitionResult partition;
    Labels labels;  // per original vertex; 0 marks a rejected vertex
    std::vector<StageTime> timings;
    double wall_seconds = 0.0;  // whole detection, excluding file I/O
};

// penalty search -> glasso at the selected penalty -> |theta| -> threshold
// pruning -> k range -> partition selection. Numerical failures are rethrown
// with the stage name prefixed, keeping the exception type's exit category.
DetectionResult run_detect(const AffinityMatrix& w, const PipelineConfig& config);

// labels.csv, outliers.csv, candidates.csv, outlier_report.csv and
// manifest.json under `dir`, each written atomically. `input` describes the
// data source for the manifest.
void write_artifacts(const DetectionResult& result, const PipelineConfig& config, const std::string& input,
                     const std::filesystem::path& dir);

std::string labels_csv(const DetectionResult& result);
std::string outliers_csv(const DetectionResult& result);
std::string candidates_csv(const DetectionResult& result);
std::string config_json(const PipelineConfig& config);

// Applies the keys present in a JSON config object; unknown keys throw.
void apply_config_json(PipelineConfig& config, const std::string& text);

}  // namespace sparcode
