#include "sparcode/partition.hpp"

#include "sparcode/error.hpp"
#include "sparcode/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>

namespace sparcode {

namespace {

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

DegreeProfile estimate_k_range(const Matrix& w) {
    const Index n = w.rows();
    if (n < 4) throw NotEnoughPoints("estimate_k_range: need at least 4 vertices");
    DegreeProfile out;
    out.degrees.resize(static_cast<std::size_t>(n));
    std::map<int, int> counts;
    for (Index i = 0; i < n; ++i) {
        const auto d = static_cast<int>((w.row(i).array() != 0.0).count());
        out.degrees[static_cast<std::size_t>(i)] = d;
        ++counts[d];
    }
    if (std::all_of(out.degrees.begin(), out.degrees.end(), [](int d) { return d == 0; }))
        throw EmptyGraph("estimate_k_range: graph has no edges");

    std::vector<double> frequencies;
    for (const auto& [degree, count] : counts) {
        const double f = static_cast<double>(count) / static_cast<double>(n);
        out.distribution.push_back({degree, f});
        frequencies.push_back(f);
    }
    out.degenerate = counts.size() == 1;
    const double med = median(frequencies);
    for (const auto& df : out.distribution)
        if (df.frequency > med) out.h.push_back(df.degree);
    if (out.h.empty())
        for (const auto& df : out.distribution) out.h.push_back(df.degree);

    const double size = static_cast<double>(n);
    const int upper = static_cast<int>(n / 2);
    const auto clamp = [upper](int k) { return std::clamp(k, 2, std::max(2, upper)); };
    out.k_min = clamp(round_half_up(size / (out.h.back() + 1)));
    out.k_max = clamp(round_half_up(size / (out.h.front() + 1)));
    if (out.k_max < out.k_min) out.k_max = out.k_min;
    return out;
}

SortedEmbedding sort_embedding(const Vector& y) {
    SortedEmbedding out;
    out.order.resize(static_cast<std::size_t>(y.size()));
    std::iota(out.order.begin(), out.order.end(), Index{0});
    std::stable_sort(out.order.begin(), out.order.end(), [&](Index a, Index b) { return y[a] < y[b]; });
    out.values.reserve(out.order.size());
    for (Index i : out.order) out.values.push_back(y[i]);
    return out;
}

PartitionCandidate balanced_partition(const SortedEmbedding& sorted, int k) {
    const auto n = static_cast<int>(sorted.values.size());
    if (k < 2 || k > n) throw InvalidK("balanced_partition: k=" + std::to_string(k) + " with n=" + std::to_string(n));
    const auto& y = sorted.values;

    PartitionCandidate out;
    out.k = k;
    out.q = n % k;

    std::vector<double> spread(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - 1);
        const int hi = std::min(n - 1, i + 1);
        double mean = 0.0;
        for (int j = lo; j <= hi; ++j) mean += y[static_cast<std::size_t>(j)];
        mean /= (hi - lo + 1);
        double ss = 0.0;
        for (int j = lo; j <= hi; ++j) ss += (y[static_cast<std::size_t>(j)] - mean) * (y[static_cast<std::size_t>(j)] - mean);
        spread[static_cast<std::size_t>(i)] = std::sqrt(ss / (hi - lo + 1));
    }
    std::vector<int> rank(static_cast<std::size_t>(n));
    std::iota(rank.begin(), rank.end(), 0);
    std::sort(rank.begin(), rank.end(), [&](int a, int b) {
        const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
        if (spread[ua] != spread[ub]) return spread[ua] > spread[ub];
        if (std::abs(y[ua]) != std::abs(y[ub])) return std::abs(y[ua]) > std::abs(y[ub]);
        return a < b;
    });
    std::vector<bool> deferred(static_cast<std::size_t>(n), false);
    for (int r = 0; r < out.q; ++r) deferred[static_cast<std::size_t>(rank[static_cast<std::size_t>(r)])] = true;

    const int block = (n - out.q) / k;
    std::vector<int> position_label(static_cast<std::size_t>(n), 0);
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    int placed = 0;
    for (int p = 0; p < n; ++p) {
        if (deferred[static_cast<std::size_t>(p)]) {
            out.ignored.push_back(p);
            continue;
        }
        const int label = placed / block + 1;
        position_label[static_cast<std::size_t>(p)] = label;
        sum[static_cast<std::size_t>(label - 1)] += y[static_cast<std::size_t>(p)];
        ++placed;
    }
    std::vector<double> centre(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) centre[static_cast<std::size_t>(c)] = sum[static_cast<std::size_t>(c)] / block;
    for (Index p : out.ignored) {
        const double v = y[static_cast<std::size_t>(p)];
        int best = 0;
        for (int c = 1; c < k; ++c)
            if (std::abs(v - centre[static_cast<std::size_t>(c)]) < std::abs(v - centre[static_cast<std::size_t>(best)])) best = c;
        position_label[static_cast<std::size_t>(p)] = best + 1;
    }

    out.labels.assign(static_cast<std::size_t>(n), 0);
    for (int p = 0; p < n; ++p)
        out.labels[static_cast<std::size_t>(sorted.order[static_cast<std::size_t>(p)])] = position_label[static_cast<std::size_t>(p)];
    return out;
}

double modularity(const Matrix& w, std::span<const int> labels) {
    return kernels::modularity_parallel(w, labels);
}

PartitionResult select_k(const Matrix& w, const DegreeProfile& profile, bool parallel) {
    if (profile.k_min < 1 || profile.k_max < profile.k_min)
        throw InvalidArgument("select_k: invalid k range");
    PartitionResult out;
    out.embedding = fiedler_embedding(w);
    const auto sorted = sort_embedding(out.embedding.y);

    const int count = profile.k_max - profile.k_min + 1;
    std::vector<PartitionCandidate> candidates(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#if defined(SPARCODE_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int c = 0; c < count; ++c) {
        try {
            auto candidate = balanced_partition(sorted, profile.k_min + c);
            candidate.modularity = kernels::modularity_serial(w, candidate.labels);
            candidates[static_cast<std::size_t>(c)] = std::move(candidate);
        } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
    }
    (void)parallel;
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::size_t best = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        out.candidates.push_back({candidates[c].k, candidates[c].modularity});
        if (candidates[c].modularity > candidates[best].modularity) best = c;
    }
    out.k_hat = candidates[best].k;
    out.labels = std::move(candidates[best].labels);
    return out;
}

}  // namespace sparcode
