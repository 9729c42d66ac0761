#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparcode {

struct Trial {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;  // set when failed
    int k_hat = 0;
    double modularity = 0.0;
    double wall_seconds = 0.0;
    std::optional<double> outlier_recall;
    std::optional<double> false_rejection;
};

struct TrialBatch {
    int k_true = 0;
    std::vector<Trial> trials;

    std::size_t completed() const;
};

// Fraction of completed trials with k_hat == k_true; failed trials are left
// out of the denominator. Throws InvalidArgument when nothing completed.
double probability_of_detection(const TrialBatch& batch);

struct Spread {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

// Quartiles by linear interpolation between order statistics.
Spread spread(std::vector<double> values);

struct BatchSummary {
    std::size_t trials = 0;
    std::size_t completed = 0;
    double p_det = 0.0;
    Spread modularity;
    Spread wall_seconds;
    std::optional<double> mean_outlier_recall;
    std::optional<double> mean_false_rejection;
};

BatchSummary summarize(const TrialBatch& batch);

std::string trials_csv(const TrialBatch& batch);
std::string summary_csv(const BatchSummary& summary);
std::string summary_table(const BatchSummary& summary, int k_true);

}  // namespace sparcode
