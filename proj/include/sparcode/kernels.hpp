#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a serial
// reference and an OpenMP variant; both produce bit-identical results for
// the same input regardless of thread count, because each output entry is
// computed by the same sequence of operations and reductions are finished
// serially in index order.

#include "sparcode/types.hpp"

#include <span>

namespace sparcode::kernels {

enum class Execution { serial, parallel };

// Z^T Z with the upper triangle mirrored and a zero diagonal.
Matrix column_gram_serial(const Matrix& z);
Matrix column_gram_parallel(const Matrix& z);
Matrix column_gram(const Matrix& z, Execution exec = Execution::parallel);

// Covariance of the columns of w (columns are variables, rows observations),
// 1/(rows-1) normalization, exactly symmetric.
Matrix column_covariance_serial(const Matrix& w);
Matrix column_covariance_parallel(const Matrix& w);
Matrix column_covariance(const Matrix& w, Execution exec = Execution::parallel);

// Weighted modularity of a labelling; see partition.hpp for the convention.
double modularity_serial(const Matrix& w, std::span<const int> labels);
double modularity_parallel(const Matrix& w, std::span<const int> labels);

// Number of OpenMP threads the parallel variants will use (1 without OpenMP).
int max_threads();

}  // namespace sparcode::kernels
