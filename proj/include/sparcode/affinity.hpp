#pragma once

#include "sparcode/kernels.hpp"
#include "sparcode/types.hpp"

#include <optional>
#include <vector>

namespace sparcode {

using kernels::Execution;

// w_ij = <x_i, x_j> / (|x_i| |x_j|), diagonal zero, entries clamped to [-1, 1].
// Throws ZeroNormColumn.
AffinityMatrix cosine_affinity(const DataMatrix& data, Execution exec = Execution::parallel);

// Pearson correlation between observation columns, diagonal zero.
// Throws ConstantColumn.
AffinityMatrix pearson_affinity(const DataMatrix& data, Execution exec = Execution::parallel);

struct SparseRepresentationOptions {
    // Weight of the data-fit term in |a|_1 + (lambda/2)|x_j - X a|^2. When
    // unset each column uses lambda_j = 10 / max_{k != j} |x_k . x_j|, i.e. the
    // soft threshold sits at a tenth of the level that zeroes the column.
    std::optional<double> lambda;
    double tol = 1e-10;      // max coefficient change per pass
    int max_iter = 10000;    // coordinate-descent passes per column
    bool record_objective = false;
    Execution exec = Execution::parallel;
};

struct SparseCoefficients {
    Matrix coefficients;  // column j represents x_j; diagonal exactly zero
    Vector residual_norm;
    std::vector<int> passes;
    std::vector<std::vector<double>> objective_traces;  // only when requested
};

struct SparseRepresentation {
    SparseCoefficients coefficients;
    AffinityMatrix affinity;  // (|A| + |A|^T) / 2
};

// Throws NonConvergence, InvalidArgument (lambda <= 0).
SparseRepresentation sparse_representation_affinity(const DataMatrix& data,
                                                    const SparseRepresentationOptions& options = {});

}  // namespace sparcode
