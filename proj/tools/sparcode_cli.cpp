// Command-line front end: detect, bench, synth, similarity.

#include "sparcode/error.hpp"
#include "sparcode/io.hpp"
#include "sparcode/metrics.hpp"
#include "sparcode/pipeline.hpp"
#include "sparcode/synthdata.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace sparcode;

struct Source {
    std::string input;
    std::string format = "";  // csv, edges, matrix; empty means from the extension
    std::string scenario;
    bool header = false;
    bool zero_based = false;
};

struct Overrides {
    std::string config_file;
    std::string similarity;
    std::optional<std::uint64_t> seed;
    std::optional<double> rho_min, rho_max;
    std::optional<int> n_rho0, n_rho;
    bool no_robust = false;
    bool serial = false;
};

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Flags beat the config file, which beats the built-in defaults.
PipelineConfig make_config(const Overrides& o) {
    PipelineConfig c;
    if (!o.config_file.empty()) {
        try {
            apply_config_json(c, read_text(o.config_file));
        } catch (const InputError& e) {
            throw InputError(o.config_file + ": " + e.what());
        }
    }
    if (!o.similarity.empty()) c.similarity = parse_similarity(o.similarity);
    if (o.seed) c.seed = *o.seed;
    if (o.rho_min) c.penalty.rho_min0 = *o.rho_min;
    if (o.rho_max) c.penalty.rho_max0 = *o.rho_max;
    if (o.n_rho0) c.penalty.n_rho0 = *o.n_rho0;
    if (o.n_rho) c.penalty.n_rho = *o.n_rho;
    if (o.no_robust) c.robust = false;
    if (o.serial) c.parallel = false;
    c.validate();
    return c;
}

std::string resolved_format(const Source& s) {
    if (!s.format.empty()) return s.format;
    const auto ext = std::filesystem::path(s.input).extension().string();
    if (ext == ".edges" || ext == ".txt" || ext == ".el") return "edges";
    return "csv";
}

ScenarioSpec load_scenario(const std::string& name_or_path, std::uint64_t seed, bool seed_given) {
    if (name_or_path == "scenario1" || name_or_path == "scenario2") return builtin_scenario(name_or_path, seed);
    if (!std::filesystem::exists(name_or_path)) throw UnknownScenario(name_or_path);
    ScenarioSpec spec;
    try {
        spec = parse_scenario_json(read_text(name_or_path));
    } catch (const SpecInvalid& e) {
        throw SpecInvalid(name_or_path + ": " + e.what());
    }
    if (seed_given) spec.seed = seed;
    return spec;
}

struct LoadedInput {
    AffinityMatrix affinity;
    std::string description;
    std::optional<GeneratedGraph> truth;
};

// Feature CSVs need a feature similarity; adjacency inputs are used as given,
// or as feature columns when a similarity is named.
LoadedInput load_input(const Source& s, PipelineConfig& config, std::uint64_t scenario_seed, bool seed_given) {
    LoadedInput out;
    if (!s.scenario.empty()) {
        auto spec = load_scenario(s.scenario, scenario_seed, seed_given);
        auto g = generate_scenario(spec);
        out.affinity = g.affinity;
        out.description = "scenario:" + spec.name + ":seed=" + std::to_string(spec.seed);
        out.truth = std::move(g);
        if (config.similarity != Similarity::precomputed) {
            DataMatrix d{out.affinity.weights(), {}};
            out.affinity = build_affinity(d, config);
        }
        return out;
    }
    if (s.input.empty()) throw InputError("either --input or --scenario is required");
    if (!std::filesystem::exists(s.input)) throw InputError("input file '" + s.input + "' does not exist");
    out.description = s.input;
    const auto format = resolved_format(s);
    if (format == "csv") {
        if (config.similarity == Similarity::precomputed)
            throw InputError("feature CSV input needs --similarity cosine, pearson or sparse_rep");
        io::FeatureCsvOptions opts;
        opts.header = s.header;
        out.affinity = build_affinity(io::load_features(s.input, opts), config);
        return out;
    }
    io::AdjacencyOptions opts;
    opts.format = io::parse_adjacency_format(format);
    opts.one_based = !s.zero_based;
    auto load = io::load_adjacency(s.input, opts);
    if (load.self_loops_dropped > 0)
        std::fprintf(stderr, "note: dropped %zu self-loops\n", load.self_loops_dropped);
    out.affinity = std::move(load.affinity);
    if (config.similarity != Similarity::precomputed) {
        DataMatrix d{out.affinity.weights(), {}};
        out.affinity = build_affinity(d, config);
    }
    return out;
}

double modularity_of(const DetectionResult& r) {
    for (const auto& c : r.partition.candidates)
        if (c.k == r.partition.k_hat) return c.modularity;
    return 0.0;
}

void print_detection(const DetectionResult& r) {
    std::printf("vertices     %lld (kept %zu, rejected %zu)\n", static_cast<long long>(r.n), r.graph.kept.size(),
                r.graph.outliers.size());
    std::printf("rho_hat      %.6g\n", r.penalty.rho_hat);
    std::printf("k range      [%d, %d]\n", r.profile.k_min, r.profile.k_max);
    std::printf("K_hat        %d\n", r.partition.k_hat);
    std::printf("modularity   %.6f\n", modularity_of(r));
    std::printf("time         %.3f s\n", r.wall_seconds);
    if (!r.pruning_note.empty()) std::printf("note         %s\n", r.pruning_note.c_str());
}

void outlier_scores(const DetectionResult& r, const GeneratedGraph& truth, Trial& t) {
    std::size_t planted = 0, caught = 0, members = 0, wrongly = 0;
    std::vector<bool> rejected(truth.labels.size(), false);
    for (Index i : r.graph.outliers) rejected[static_cast<std::size_t>(i)] = true;
    for (std::size_t i = 0; i < truth.labels.size(); ++i) {
        if (truth.outlier[i]) {
            ++planted;
            caught += rejected[i];
        } else {
            ++members;
            wrongly += rejected[i];
        }
    }
    if (planted > 0) {
        t.outlier_recall = static_cast<double>(caught) / static_cast<double>(planted);
        t.false_rejection = static_cast<double>(wrongly) / static_cast<double>(members);
    }
}

int true_communities(const ScenarioSpec& spec) {
    return static_cast<int>(spec.blocks()) - (spec.outlier_block ? 1 : 0);
}

int run_detect_command(const Source& s, const Overrides& o, const std::string& out_dir) {
    auto config = make_config(o);
    const auto input = load_input(s, config, config.seed, o.seed.has_value());
    const auto result = run_detect(input.affinity, config);
    print_detection(result);
    write_artifacts(result, config, input.description, out_dir);
    std::printf("artifacts    %s\n", out_dir.c_str());
    return 0;
}

int run_bench_command(const Source& s, const Overrides& o, int trials, const std::string& out_dir) {
    if (trials < 1) throw InvalidArgument("--trials must be at least 1");
    auto config = make_config(o);
    const std::uint64_t base = o.seed.value_or(1);
    TrialBatch batch;
    if (!s.scenario.empty()) {
        const auto spec = load_scenario(s.scenario, base, true);
        batch.k_true = true_communities(spec);
    }
    for (int t = 0; t < trials; ++t) {
        Trial trial;
        trial.seed = base + static_cast<std::uint64_t>(t);
        try {
            const auto input = load_input(s, config, trial.seed, true);
            const auto r = run_detect(input.affinity, config);
            trial.k_hat = r.partition.k_hat;
            trial.modularity = modularity_of(r);
            trial.wall_seconds = r.wall_seconds;
            if (input.truth) outlier_scores(r, *input.truth, trial);
        } catch (const InputError&) {
            throw;
        } catch (const Error& e) {
            trial.failed = true;
            trial.error = e.what();
            std::fprintf(stderr, "trial %d (seed %llu) failed: %s\n", t + 1,
                         static_cast<unsigned long long>(trial.seed), e.what());
        }
        batch.trials.push_back(std::move(trial));
    }
    io::write_file_atomic(std::filesystem::path(out_dir) / "trials.csv", trials_csv(batch));
    if (batch.completed() == 0) {
        std::fprintf(stderr, "all %d trials failed\n", trials);
        return 1;
    }
    const auto summary = summarize(batch);
    io::write_file_atomic(std::filesystem::path(out_dir) / "summary.csv", summary_csv(summary));
    std::fputs(summary_table(summary, batch.k_true).c_str(), stdout);
    return 0;
}

int run_synth_command(const std::string& scenario, std::optional<std::uint64_t> seed, const std::string& out_dir) {
    if (scenario.empty()) throw InputError("--scenario (name or spec file) is required");
    const auto spec = load_scenario(scenario, seed.value_or(1), seed.has_value());
    const auto g = generate_scenario(spec);
    const std::filesystem::path dir(out_dir);
    io::write_file_atomic(dir / "matrix.csv", io::dense_csv(g.affinity.weights()));
    std::string labels = "original_index,block,outlier\n";
    for (std::size_t i = 0; i < g.labels.size(); ++i)
        labels += std::to_string(i + 1) + ',' + std::to_string(g.labels[i]) + ',' + (g.outlier[i] ? "1" : "0") + '\n';
    io::write_file_atomic(dir / "labels.csv", labels);
    nlohmann::json m;
    m["rng"] = Xoshiro256StarStar::name;
    m["rng_constants"] = {{"splitmix64_increment", "0x9e3779b97f4a7c15"},
                          {"splitmix64_multipliers", {"0xbf58476d1ce4e5b9", "0x94d049bb133111eb"}},
                          {"xoshiro_output", "rotl(s1 * 5, 7) * 9"},
                          {"xoshiro_shifts", {17, 45}}};
    m["draw_order"] = "one draw per unordered pair i<j, row-major, including absent pairs";
    m["spec"] = nlohmann::json::parse(scenario_json(spec));
    io::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
    std::printf("wrote %lld x %lld matrix to %s\n", static_cast<long long>(spec.size()),
                static_cast<long long>(spec.size()), out_dir.c_str());
    return 0;
}

int run_similarity_command(const Source& s, const Overrides& o, const std::string& out_dir) {
    auto config = make_config(o);
    if (config.similarity == Similarity::precomputed) throw InputError("--similarity is required");
    const auto input = load_input(s, config, config.seed, o.seed.has_value());
    io::write_file_atomic(std::filesystem::path(out_dir) / "affinity.csv", io::dense_csv(input.affinity.weights()));
    std::printf("wrote %lld x %lld affinity to %s\n", static_cast<long long>(input.affinity.size()),
                static_cast<long long>(input.affinity.size()), out_dir.c_str());
    return 0;
}

void add_source_options(CLI::App* cmd, Source& s) {
    cmd->add_option("--input", s.input, "Feature CSV, edge list or dense adjacency CSV");
    cmd->add_option("--format", s.format, "Input format")->check(CLI::IsMember({"csv", "edges", "matrix"}));
    cmd->add_option("--scenario", s.scenario, "Built-in scenario (scenario1, scenario2) or spec JSON file");
    cmd->add_flag("--header", s.header, "Feature CSV has a header line");
    cmd->add_flag("--zero-based", s.zero_based, "Edge list vertex ids start at 0");
}

void add_pipeline_options(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_file, "JSON config file");
    cmd->add_option("--similarity", o.similarity, "cosine, pearson, sparse_rep or precomputed")
        ->check(CLI::IsMember({"cosine", "pearson", "sparse_rep", "precomputed"}));
    cmd->add_option("--seed", o.seed, "Seed for generated inputs");
    cmd->add_option("--rho-min", o.rho_min, "Lower end of the coarse penalty grid");
    cmd->add_option("--rho-max", o.rho_max, "Upper end of the coarse penalty grid");
    cmd->add_option("--n-rho0", o.n_rho0, "Coarse grid size");
    cmd->add_option("--n-rho", o.n_rho, "Refined grid size");
    cmd->add_flag("--no-robust", o.no_robust, "Skip threshold pruning");
    cmd->add_flag("--serial", o.serial, "Run every kernel single-threaded");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparsity-aware robust community detection"};
    app.require_subcommand(1);

    Source source;
    Overrides overrides;
    std::string out_dir = "sparcode-out";
    int trials = 10;

    auto* detect = app.add_subcommand("detect", "Detect communities in one graph");
    add_source_options(detect, source);
    add_pipeline_options(detect, overrides);
    detect->add_option("--out-dir", out_dir, "Directory for labels, outliers, candidates and manifest");

    auto* bench = app.add_subcommand("bench", "Repeat detection over seeded trials");
    add_source_options(bench, source);
    add_pipeline_options(bench, overrides);
    bench->add_option("--trials", trials, "Number of trials");
    bench->add_option("--out-dir", out_dir, "Directory for trials.csv and summary.csv");

    auto* synth = app.add_subcommand("synth", "Generate a benchmark graph");
    synth->add_option("--scenario", source.scenario, "Built-in scenario or spec JSON file");
    synth->add_option("--seed", overrides.seed, "Generator seed");
    synth->add_option("--out-dir", out_dir, "Output directory");

    auto* similarity = app.add_subcommand("similarity", "Build an affinity matrix only");
    add_source_options(similarity, source);
    add_pipeline_options(similarity, overrides);
    similarity->add_option("--out-dir", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*detect) return run_detect_command(source, overrides, out_dir);
        if (*bench) return run_bench_command(source, overrides, trials, out_dir);
        if (*synth) return run_synth_command(source.scenario, overrides.seed, out_dir);
        if (*similarity) return run_similarity_command(source, overrides, out_dir);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
