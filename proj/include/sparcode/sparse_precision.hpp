#pragma once

#include "sparcode/kernels.hpp"
#include "sparcode/types.hpp"

#include <vector>

namespace sparcode {

// Symmetric n x n matrix with a nonnegative diagonal.
class CovarianceMatrix {
public:
    // Throws InvalidArgument unless symmetric within 1e-12 with diag >= 0.
    explicit CovarianceMatrix(Matrix values);
    const Matrix& values() const noexcept { return values_; }
    Index size() const noexcept { return values_.rows(); }

private:
    Matrix values_;
};

// Covariance of the columns of w (1/(n-1) normalization), symmetrized.
CovarianceMatrix sample_covariance(const AffinityMatrix& w,
                                   kernels::Execution exec = kernels::Execution::parallel);

// The covariance rescaled to unit diagonal (Pearson correlation of the
// columns of w). A zero-variance column gets a unit diagonal entry and zero
// correlation with everything else.
CovarianceMatrix sample_correlation(const AffinityMatrix& w,
                                    kernels::Execution exec = kernels::Execution::parallel);

struct GlassoOptions {
    double tol = 1e-4;          // mean absolute change of the covariance estimate per sweep
    int max_iter = 200;         // outer sweeps
    bool penalize_diagonal = true;
    int max_inner_passes = 5000;
    bool record_objective = false;  // penalized log-likelihood after every sweep
};

struct PrecisionEstimate {
    Matrix theta;       // symmetric; diagonal strictly positive
    Matrix covariance;  // the solver's working estimate of theta^-1
    double rho = 0.0;
    double dual_gap = 0.0;     // tr(S theta) + rho |theta|_1 - n
    double last_change = 0.0;  // convergence measure of the final sweep
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace;
};

// Penalized log-likelihood log|theta| - tr(S theta) - rho |theta|_1. Returns
// -inf when theta is not positive definite.
double glasso_objective(const Matrix& s, const Matrix& theta, double rho, bool penalize_diagonal = true);

// l1-penalized maximum likelihood precision estimate by block coordinate
// descent over the columns of the covariance estimate, each column solving a
// lasso by cyclic coordinate descent. Starts from theta = diag(S + rho)^-1.
// Components of the graph |S_ij| > rho are solved separately (the solution is
// block diagonal over them) unless record_objective is set. Converged means
// the mean absolute change of the covariance estimate fell below tol.
// Throws InvalidArgument (rho <= 0, tol <= 0) and NotPositiveDefinite when
// S + rho I has no Cholesky factor.
PrecisionEstimate glasso(const CovarianceMatrix& s, double rho, const GlassoOptions& options = {});

// |theta| with a zero diagonal; nonnegative and exactly symmetric.
class SparseAffinity {
public:
    SparseAffinity() = default;
    SparseAffinity(Matrix weights, double rho);
    const Matrix& weights() const noexcept { return weights_; }
    double rho() const noexcept { return rho_; }
    Index size() const noexcept { return weights_.rows(); }

private:
    Matrix weights_;
    double rho_ = 0.0;
};

SparseAffinity sparse_affinity(const PrecisionEstimate& estimate);

}  // namespace sparcode
