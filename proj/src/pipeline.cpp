#include "sparcode/pipeline.hpp"

#include "sparcode/error.hpp"
#include "sparcode/io.hpp"

#include <json.hpp>

#include <chrono>
#include <limits>

namespace sparcode {

Similarity parse_similarity(std::string_view name) {
    if (name == "cosine") return Similarity::cosine;
    if (name == "pearson") return Similarity::pearson;
    if (name == "sparse_rep") return Similarity::sparse_rep;
    if (name == "precomputed") return Similarity::precomputed;
    throw InvalidArgument("unknown similarity '" + std::string(name) + "'");
}

std::string to_string(Similarity s) {
    switch (s) {
        case Similarity::cosine: return "cosine";
        case Similarity::pearson: return "pearson";
        case Similarity::sparse_rep: return "sparse_rep";
        case Similarity::precomputed: return "precomputed";
    }
    return "?";
}

void PipelineConfig::validate() const {
    penalty.validate();
    if (!(glasso.tol > 0.0) || glasso.max_iter < 1) throw InvalidArgument("glasso: tol > 0 and max_iter >= 1 required");
    if (!(gmm.tol > 0.0) || gmm.max_iter < 1) throw InvalidArgument("gmm: tol > 0 and max_iter >= 1 required");
    if (sparse_rep.lambda && !(*sparse_rep.lambda > 0.0)) throw InvalidArgument("sparse_rep: lambda must be positive");
}

AffinityMatrix build_affinity(const DataMatrix& data, const PipelineConfig& config) {
    const auto exec = config.parallel ? Execution::parallel : Execution::serial;
    switch (config.similarity) {
        case Similarity::cosine: return cosine_affinity(data, exec);
        case Similarity::pearson: return pearson_affinity(data, exec);
        case Similarity::sparse_rep: {
            auto options = config.sparse_rep;
            options.exec = exec;
            return sparse_representation_affinity(data, options).affinity;
        }
        case Similarity::precomputed: break;
    }
    throw InvalidArgument("similarity 'precomputed' takes an adjacency input, not features");
}

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
auto stage(const char* name, std::vector<StageTime>& timings, F&& body) {
    const auto start = Clock::now();
    auto record = [&] {
        timings.push_back({name, std::chrono::duration<double>(Clock::now() - start).count()});
    };
    try {
        auto value = body();
        record();
        return value;
    } catch (const InputError& e) {
        throw InputError(std::string(name) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(name) + ": " + e.what());
    }
}

}  // namespace

DetectionResult run_detect(const AffinityMatrix& w, const PipelineConfig& config) {
    config.validate();
    const auto start = Clock::now();
    DetectionResult r;
    r.n = w.size();
    if (r.n < 4) throw InputError("detect: need at least 4 vertices");

    const auto s = stage("covariance", r.timings, [&] {
        const auto exec = config.parallel ? Execution::parallel : Execution::serial;
        return config.scaling == CovarianceScaling::correlation ? sample_correlation(w, exec)
                                                                 : sample_covariance(w, exec);
    });
    r.penalty = stage("penalty search", r.timings, [&] {
        return select_penalty([&](double rho) { return evaluate_penalty(s, rho, config.glasso); }, config.penalty,
                              config.parallel);
    });
    const auto sparse = stage("sparse graph", r.timings, [&] {
        const auto estimate = glasso(s, r.penalty.rho_hat, config.glasso);
        r.glasso_iterations = estimate.iterations;
        r.glasso_converged = estimate.converged;
        r.glasso_dual_gap = estimate.dual_gap;
        return sparse_affinity(estimate);
    });

    r.graph = stage("robust graph", r.timings, [&] {
        r.u = aggregate_coefficients(sparse);
        double threshold = -std::numeric_limits<double>::infinity();
        if (!config.robust) {
            r.pruning_note = "threshold pruning disabled; only edgeless vertices removed";
        } else {
            try {
                r.gmm = fit_two_mode_gmm(r.u, config.gmm);
                threshold = compute_threshold(r.u, *r.gmm);
            } catch (const DegenerateComponent& e) {
                r.pruning_note = std::string("threshold skipped: ") + e.what() + "; only edgeless vertices removed";
            }
        }
        return prune_and_reject(sparse.weights(), threshold);
    });

    r.profile = stage("k range", r.timings, [&] { return estimate_k_range(r.graph.weights); });
    r.partition = stage("partition", r.timings, [&] { return select_k(r.graph.weights, r.profile, config.parallel); });

    r.labels.assign(static_cast<std::size_t>(r.n), 0);
    for (std::size_t a = 0; a < r.graph.kept.size(); ++a)
        r.labels[static_cast<std::size_t>(r.graph.kept[a])] = r.partition.labels[a];
    r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return r;
}

std::string labels_csv(const DetectionResult& result) {
    std::string out = "original_index,label\n";
    for (std::size_t i = 0; i < result.labels.size(); ++i)
        out += std::to_string(i + 1) + ',' + (result.labels[i] == 0 ? std::string("outlier") : std::to_string(result.labels[i])) + '\n';
    return out;
}

std::string outliers_csv(const DetectionResult& result) {
    std::string out = "original_index\n";
    for (Index i : result.graph.outliers) out += std::to_string(i + 1) + '\n';
    return out;
}

std::string candidates_csv(const DetectionResult& result) {
    std::string out = "k,modularity\n";
    for (const auto& c : result.partition.candidates)
        out += std::to_string(c.k) + ',' + io::format_double(c.modularity) + '\n';
    return out;
}

namespace {

using nlohmann::json;

json config_object(const PipelineConfig& c) {
    json j;
    j["similarity"] = to_string(c.similarity);
    j["covariance"] = c.scaling == CovarianceScaling::correlation ? "correlation" : "covariance";
    j["rho_min0"] = c.penalty.rho_min0;
    j["rho_max0"] = c.penalty.rho_max0;
    j["n_rho0"] = c.penalty.n_rho0;
    j["n_rho"] = c.penalty.n_rho;
    j["spline_samples"] = c.penalty.spline_samples;
    j["glasso_tol"] = c.glasso.tol;
    j["glasso_max_iter"] = c.glasso.max_iter;
    j["penalize_diagonal"] = c.glasso.penalize_diagonal;
    j["gmm_tol"] = c.gmm.tol;
    j["gmm_max_iter"] = c.gmm.max_iter;
    j["robust"] = c.robust;
    j["parallel"] = c.parallel;
    j["seed"] = c.seed;
    j["sparse_rep_lambda"] = c.sparse_rep.lambda ? json(*c.sparse_rep.lambda) : json(nullptr);
    return j;
}

}  // namespace

std::string config_json(const PipelineConfig& config) { return config_object(config).dump(2); }

void apply_config_json(PipelineConfig& c, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw InputError("config: expected a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "similarity") c.similarity = parse_similarity(v.get<std::string>());
            else if (key == "covariance") {
                const auto s = v.get<std::string>();
                if (s == "correlation") c.scaling = CovarianceScaling::correlation;
                else if (s == "covariance") c.scaling = CovarianceScaling::covariance;
                else throw InvalidArgument("config: covariance must be 'correlation' or 'covariance'");
            }
            else if (key == "rho_min0") c.penalty.rho_min0 = v.get<double>();
            else if (key == "rho_max0") c.penalty.rho_max0 = v.get<double>();
            else if (key == "n_rho0") c.penalty.n_rho0 = v.get<int>();
            else if (key == "n_rho") c.penalty.n_rho = v.get<int>();
            else if (key == "spline_samples") c.penalty.spline_samples = v.get<int>();
            else if (key == "glasso_tol") c.glasso.tol = v.get<double>();
            else if (key == "glasso_max_iter") c.glasso.max_iter = v.get<int>();
            else if (key == "penalize_diagonal") c.glasso.penalize_diagonal = v.get<bool>();
            else if (key == "gmm_tol") c.gmm.tol = v.get<double>();
            else if (key == "gmm_max_iter") c.gmm.max_iter = v.get<int>();
            else if (key == "robust") c.robust = v.get<bool>();
            else if (key == "parallel") c.parallel = v.get<bool>();
            else if (key == "seed") c.seed = v.get<std::uint64_t>();
            else if (key == "sparse_rep_lambda") {
                if (v.is_null()) c.sparse_rep.lambda.reset();
                else c.sparse_rep.lambda = v.get<double>();
            }
            else throw InvalidArgument("config: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("config: ") + e.what());
    }
}

void write_artifacts(const DetectionResult& r, const PipelineConfig& config, const std::string& input,
                     const std::filesystem::path& dir) {
    io::write_file_atomic(dir / "labels.csv", labels_csv(r));
    io::write_file_atomic(dir / "outliers.csv", outliers_csv(r));
    io::write_file_atomic(dir / "candidates.csv", candidates_csv(r));
    io::write_file_atomic(dir / "outlier_report.csv",
                          outlier_report_csv(r.u, r.gmm ? &*r.gmm : nullptr, r.graph));

    json m;
    m["input"] = input;
    m["config"] = config_object(config);
    m["n"] = r.n;
    json scores = json::array();
    for (const auto& s : r.penalty.scores)
        scores.push_back({{"rho", s.rho}, {"score", s.score}, {"signed_score", s.signed_score}, {"pass", s.pass}});
    m["penalty"] = {{"rho_hat", r.penalty.rho_hat},
                    {"spline_peak", r.penalty.spline_peak},
                    {"refined_interval", {r.penalty.refined_min, r.penalty.refined_max}},
                    {"scores", scores}};
    m["glasso"] = {{"iterations", r.glasso_iterations},
                   {"converged", r.glasso_converged},
                   {"dual_gap", r.glasso_dual_gap}};
    json robust;
    robust["threshold"] = std::isfinite(r.graph.threshold) ? json(r.graph.threshold) : json(nullptr);
    robust["kept"] = r.graph.kept.size();
    robust["outliers"] = r.graph.outliers.size();
    if (!r.pruning_note.empty()) robust["note"] = r.pruning_note;
    if (r.gmm)
        robust["gmm"] = {{"tau", r.gmm->tau},
                         {"mean", r.gmm->mean},
                         {"variance", r.gmm->variance},
                         {"iterations", r.gmm->iterations},
                         {"converged", r.gmm->converged}};
    m["robust"] = robust;
    m["k_range"] = {r.profile.k_min, r.profile.k_max};
    m["k_hat"] = r.partition.k_hat;
    m["modularity"] = [&] {
        for (const auto& c : r.partition.candidates)
            if (c.k == r.partition.k_hat) return c.modularity;
        return 0.0;
    }();
    json timings = json::object();
    for (const auto& t : r.timings) timings[t.stage] = t.seconds;
    m["timings_seconds"] = timings;
    m["wall_seconds"] = r.wall_seconds;
    io::write_file_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace sparcode
