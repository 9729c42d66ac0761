#pragma once

#include "sparcode/sparse_precision.hpp"
#include "sparcode/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace sparcode {

// Row means of the column-wise sorted weight matrix: u_i is the average of
// the i-th smallest entry of every column, so u is nondecreasing.
Vector aggregate_coefficients(const Matrix& w);
Vector aggregate_coefficients(const SparseAffinity& w);

struct GmmOptions {
    int max_iter = 1000;
    double tol = 1e-10;  // relative change of the log-likelihood
};

// Two-component univariate Gaussian mixture, components ordered by mean.
struct GmmFit {
    std::array<double, 2> tau{};
    std::array<double, 2> mean{};
    std::array<double, 2> variance{};
    std::vector<double> log_likelihood;  // one entry per EM iteration, starting at the initial guess
    int iterations = 0;
    bool converged = false;
};

// EM started from the lower/upper half means of sorted u with variance
// var(u)/4 each and equal weights. Throws NotEnoughPoints (n < 4) and
// DegenerateComponent when u is constant or a variance collapses below
// 1e-12 var(u).
GmmFit fit_two_mode_gmm(const Vector& u, const GmmOptions& options = {});

// One EM update from `fit`; used to check stationarity.
GmmFit em_step(const Vector& u, const GmmFit& fit);

// Responsibilities (v1, v2) of u_i, computed in the log domain.
std::array<double, 2> posterior(double u, const GmmFit& fit);

// The sample minimizing |v2 - v1|; ties go to the smaller sample.
double compute_threshold(const Vector& u, const GmmFit& fit);

struct RobustGraph {
    Matrix weights;             // kept vertices only
    std::vector<Index> kept;    // row of `weights` -> original vertex
    std::vector<Index> outliers;  // original vertices left with no edge
    double threshold = 0.0;
};

// Removes edges with weight <= t, then every vertex left without an edge.
// Throws EverythingRejected if fewer than three vertices remain.
RobustGraph prune_and_reject(const Matrix& w, double t);

// CSV rows (original_index, u, v1, v2, rejected). u is the order-statistic
// average for row i, reported beside vertex i.
std::string outlier_report_csv(const Vector& u, const GmmFit* fit, const RobustGraph& graph);

}  // namespace sparcode
