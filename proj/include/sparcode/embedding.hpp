#pragma once

#include "sparcode/sparse_precision.hpp"
#include "sparcode/types.hpp"

#include <functional>
#include <vector>

namespace sparcode {

// One-dimensional spectral embedding: the generalized eigenvector of
// (D - W) y = lambda D y for the second-smallest eigenvalue, scaled so that
// y'Dy = 1, with its largest-magnitude entry positive.
struct FiedlerEmbedding {
    Vector y;
    double eigenvalue = 0.0;
    int multiplicity = 1;         // dimension of the eigenspace y was taken from
    double norm_residual = 0.0;   // |y'Dy - 1|
    double balance_residual = 0.0;  // |y'D 1|
};

struct FiedlerOptions {
    Index dense_limit = 2000;        // above this, shift-invert subspace iteration
    double cluster_tolerance = 1e-9;  // eigenvalues this close to lambda_2 count as repeated
    double iteration_tolerance = 1e-11;
    int max_iterations = 500;
};

// Throws IsolatedVertex (zero row sum), InvalidArgument (n < 2, negative
// weights) and SolverFailure.
//
// When lambda_2 is repeated (a graph with several connected components) the
// eigenspace has no preferred basis. The returned vector is then the
// D-orthogonal projection of the degree vector onto that eigenspace, which
// is independent of the solver's basis, so every backend returns the same y.
FiedlerEmbedding fiedler_embedding(const Matrix& w, const FiedlerOptions& options = {});
FiedlerEmbedding fiedler_embedding(const AffinityMatrix& w, const FiedlerOptions& options = {});
FiedlerEmbedding fiedler_embedding(const SparseAffinity& w, const FiedlerOptions& options = {});

struct FiedlerSplit {
    std::vector<Index> lower;  // y_i <= s
    std::vector<Index> upper;  // y_i > s
};

FiedlerSplit split_fiedler(const Vector& y, double s = 0.0);

double median(std::vector<double> values);

struct Polarization {
    double score = 0.0;   // |med(lower) - med(upper)|, 0 when a side is empty
    double signed_score = 0.0;  // med(lower) - med(upper)
    bool degenerate = false;
};

Polarization polarization(const Vector& y);
double polarization_score(const FiedlerEmbedding& embedding);

struct PenaltySearchConfig {
    double rho_min0 = 0.1;
    double rho_max0 = 0.99;
    int n_rho0 = 5;
    int n_rho = 5;
    int spline_samples = 200;

    void validate() const;  // throws InvalidArgument
};

struct PenaltyScore {
    double rho = 0.0;
    double score = 0.0;
    double signed_score = 0.0;
    int pass = 0;  // 0 coarse, 1 refined
};

struct PenaltySearchResult {
    double rho_hat = 0.0;
    double spline_peak = 0.0;  // interpolated score at rho_hat
    double refined_min = 0.0;
    double refined_max = 0.0;
    std::vector<PenaltyScore> scores;
};

// Scores one candidate penalty. Must be deterministic and thread-safe.
using PenaltyEvaluator = std::function<Polarization(double rho)>;

// Coarse grid, refined grid between the coarse maximizer's neighbours, then
// a natural cubic spline through the refined scores maximized over dense
// samples (plus the refined grid points themselves). Among tied maxima the
// centre of the first maximizing plateau is returned. Throws AllScoresZero.
PenaltySearchResult select_penalty(const PenaltyEvaluator& evaluate, const PenaltySearchConfig& config,
                                   bool parallel = true);

// How the covariance input of the penalized estimator is formed from W.
enum class CovarianceScaling { covariance, correlation };

// The polarization of the sparse graph |theta(rho)|, computed on the
// vertices that keep at least one edge (fewer than three such vertices
// scores 0).
Polarization evaluate_penalty(const CovarianceMatrix& s, double rho, const GlassoOptions& glasso_options,
                              const FiedlerOptions& fiedler_options = {});

PenaltySearchResult select_penalty(const AffinityMatrix& w, const PenaltySearchConfig& config,
                                   const GlassoOptions& glasso_options,
                                   CovarianceScaling scaling = CovarianceScaling::correlation,
                                   bool parallel = true);

// Natural cubic spline through (x, y); x strictly increasing, at least 3 points.
class NaturalCubicSpline {
public:
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y);
    ~NaturalCubicSpline();
    NaturalCubicSpline(const NaturalCubicSpline&) = delete;
    NaturalCubicSpline& operator=(const NaturalCubicSpline&) = delete;

    double operator()(double x) const;

private:
    std::vector<double> x_;
    std::vector<double> y_;
    void* spline_ = nullptr;
    void* accel_ = nullptr;
};

}  // namespace sparcode
