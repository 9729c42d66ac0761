#include "sparcode/metrics.hpp"

#include "sparcode/error.hpp"
#include "sparcode/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sparcode {

std::size_t TrialBatch::completed() const {
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](const Trial& t) { return !t.failed; }));
}

double probability_of_detection(const TrialBatch& batch) {
    const auto done = batch.completed();
    if (done == 0) throw InvalidArgument("probability_of_detection: no completed trials");
    const auto hits = std::count_if(batch.trials.begin(), batch.trials.end(),
                                    [&](const Trial& t) { return !t.failed && t.k_hat == batch.k_true; });
    return static_cast<double>(hits) / static_cast<double>(done);
}

Spread spread(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("spread of an empty set");
    std::sort(values.begin(), values.end());
    const auto at = [&](double p) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {at(0.5), at(0.25), at(0.75)};
}

BatchSummary summarize(const TrialBatch& batch) {
    BatchSummary s;
    s.trials = batch.trials.size();
    s.completed = batch.completed();
    s.p_det = probability_of_detection(batch);
    std::vector<double> q, t, recall, false_rej;
    for (const auto& trial : batch.trials) {
        if (trial.failed) continue;
        q.push_back(trial.modularity);
        t.push_back(trial.wall_seconds);
        if (trial.outlier_recall) recall.push_back(*trial.outlier_recall);
        if (trial.false_rejection) false_rej.push_back(*trial.false_rejection);
    }
    s.modularity = spread(q);
    s.wall_seconds = spread(t);
    const auto mean = [](const std::vector<double>& v) {
        double sum = 0.0;
        for (double x : v) sum += x;
        return sum / static_cast<double>(v.size());
    };
    if (!recall.empty()) s.mean_outlier_recall = mean(recall);
    if (!false_rej.empty()) s.mean_false_rejection = mean(false_rej);
    return s;
}

namespace {

std::string optional_cell(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

}  // namespace

std::string trials_csv(const TrialBatch& batch) {
    std::string out = "trial,seed,status,k_hat,k_true,modularity,wall_seconds,outlier_recall,false_rejection\n";
    for (std::size_t i = 0; i < batch.trials.size(); ++i) {
        const auto& t = batch.trials[i];
        out += std::to_string(i + 1) + ',' + std::to_string(t.seed) + ',';
        if (t.failed) {
            out += "failed,,," + std::to_string(batch.k_true) + ",,,\n";
            continue;
        }
        out += "ok," + std::to_string(t.k_hat) + ',' + std::to_string(batch.k_true) + ',' +
               io::format_double(t.modularity) + ',' + io::format_double(t.wall_seconds) + ',' +
               optional_cell(t.outlier_recall) + ',' + optional_cell(t.false_rejection) + '\n';
    }
    return out;
}

std::string summary_csv(const BatchSummary& s) {
    std::string out =
        "trials,completed,p_det,q_median,q_q1,q_q3,t_median,t_q1,t_q3,mean_outlier_recall,mean_false_rejection\n";
    out += std::to_string(s.trials) + ',' + std::to_string(s.completed) + ',' + io::format_double(s.p_det) + ',' +
           io::format_double(s.modularity.median) + ',' + io::format_double(s.modularity.q1) + ',' +
           io::format_double(s.modularity.q3) + ',' + io::format_double(s.wall_seconds.median) + ',' +
           io::format_double(s.wall_seconds.q1) + ',' + io::format_double(s.wall_seconds.q3) + ',' +
           optional_cell(s.mean_outlier_recall) + ',' + optional_cell(s.mean_false_rejection) + '\n';
    return out;
}

std::string summary_table(const BatchSummary& s, int k_true) {
    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof buf, "trials      %zu (%zu completed)\n", s.trials, s.completed);
    out += buf;
    std::snprintf(buf, sizeof buf, "p_det       %.3f  (K = %d)\n", s.p_det, k_true);
    out += buf;
    std::snprintf(buf, sizeof buf, "Q           median %.4f  IQR [%.4f, %.4f]\n", s.modularity.median,
                  s.modularity.q1, s.modularity.q3);
    out += buf;
    std::snprintf(buf, sizeof buf, "time (s)    median %.4f  IQR [%.4f, %.4f]\n", s.wall_seconds.median,
                  s.wall_seconds.q1, s.wall_seconds.q3);
    out += buf;
    if (s.mean_outlier_recall) {
        std::snprintf(buf, sizeof buf, "outliers    recall %.4f  false rejection %.4f\n", *s.mean_outlier_recall,
                      s.mean_false_rejection.value_or(0.0));
        out += buf;
    }
    return out;
}

}  // namespace sparcode
