// Serial reference against the OpenMP variant of each kernel, on the sizes
// the pipeline sees (n in the low hundreds). Run with
//   ./build/bench/sparcode_bench --benchmark_counters_tabular=true

#include "sparcode/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace sparcode;

namespace {

Matrix random_weights(Index n) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix w(n, n);
    for (Index i = 0; i < n; ++i) {
        w(i, i) = 0.0;
        for (Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = u(rng);
    }
    return w;
}

std::vector<int> random_labels(Index n, int k) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(1, k);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = pick(rng);
    return labels;
}

template <Matrix (*Kernel)(const Matrix&)>
void matrix_kernel(benchmark::State& state) {
    const Matrix w = random_weights(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w));
    state.counters["threads"] = kernels::max_threads();
}

template <double (*Kernel)(const Matrix&, std::span<const int>)>
void modularity_kernel(benchmark::State& state) {
    const Matrix w = random_weights(state.range(0));
    const auto labels = random_labels(state.range(0), 6);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w, labels));
    state.counters["threads"] = kernels::max_threads();
}

void sizes(benchmark::internal::Benchmark* b) {
    for (int n : {64, 128, 258, 512}) b->Arg(n);
    b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(matrix_kernel<kernels::column_gram_serial>)->Name("column_gram/serial")->Apply(sizes);
BENCHMARK(matrix_kernel<kernels::column_gram_parallel>)->Name("column_gram/parallel")->Apply(sizes);
BENCHMARK(matrix_kernel<kernels::column_covariance_serial>)->Name("column_covariance/serial")->Apply(sizes);
BENCHMARK(matrix_kernel<kernels::column_covariance_parallel>)->Name("column_covariance/parallel")->Apply(sizes);
BENCHMARK(modularity_kernel<kernels::modularity_serial>)->Name("modularity/serial")->Apply(sizes);
BENCHMARK(modularity_kernel<kernels::modularity_parallel>)->Name("modularity/parallel")->Apply(sizes);

BENCHMARK_MAIN();
