#pragma once

#include "sparcode/embedding.hpp"
#include "sparcode/types.hpp"

#include <span>
#include <vector>

namespace sparcode {

struct DegreeFrequency {
    int degree = 0;
    double frequency = 0.0;
};

struct DegreeProfile {
    std::vector<int> degrees;            // nonzero edges per vertex
    std::vector<DegreeFrequency> distribution;  // distinct degrees, ascending
    std::vector<int> h;                  // degrees whose frequency exceeds the median frequency
    int k_min = 2;
    int k_max = 2;
    bool degenerate = false;  // one distinct degree value
};

// Community-count range from the degree distribution:
// k_min = round(n / (max h + 1)), k_max = round(n / (min h + 1)), rounded
// half up and clamped to [2, n/2]. When no frequency exceeds the median
// (every distinct degree equally common) h is the whole support.
// Throws NotEnoughPoints (n < 4) and EmptyGraph (no edges).
DegreeProfile estimate_k_range(const Matrix& w);

struct SortedEmbedding {
    std::vector<double> values;  // ascending
    std::vector<Index> order;    // order[p] = original index of values[p]
};

// Ascending, ties by original index.
SortedEmbedding sort_embedding(const Vector& y);

struct PartitionCandidate {
    int k = 0;
    Labels labels;  // by original index, values 1..k
    int q = 0;
    std::vector<Index> ignored;  // sorted positions deferred from the equal split
    double modularity = 0.0;
};

// Equal contiguous blocks over the sorted embedding after deferring the q =
// n mod k positions whose 3-point neighbourhood has the largest population
// standard deviation (ties: larger |y|, then earlier position). Deferred
// points join the block with the nearest mean (ties: lower label).
// Throws InvalidK.
PartitionCandidate balanced_partition(const SortedEmbedding& sorted, int k);

// Weighted modularity with the double sum over all ordered pairs, j = m
// included. Throws EmptyGraph and DimensionMismatch.
double modularity(const Matrix& w, std::span<const int> labels);

struct KCandidate {
    int k = 0;
    double modularity = 0.0;
};

struct PartitionResult {
    int k_hat = 0;
    Labels labels;
    std::vector<KCandidate> candidates;
    FiedlerEmbedding embedding;
};

// One embedding of w, a balanced partition per k in [k_min, k_max], and the
// highest-modularity candidate (ties: smaller k).
PartitionResult select_k(const Matrix& w, const DegreeProfile& profile, bool parallel = true);

}  // namespace sparcode
