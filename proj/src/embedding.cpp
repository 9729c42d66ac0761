#include "sparcode/embedding.hpp"

#include "sparcode/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>

namespace sparcode {

namespace {

Vector checked_degrees(const Matrix& w) {
    if (w.rows() != w.cols()) throw DimensionMismatch("fiedler_embedding: weights must be square");
    if (w.rows() < 2) throw InvalidArgument("fiedler_embedding: need at least two vertices");
    if ((w.array() < 0.0).any()) throw InvalidArgument("fiedler_embedding: negative weight");
    Vector d = w.rowwise().sum();
    for (Index i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0)) throw IsolatedVertex(static_cast<std::size_t>(i));
    return d;
}

// Smallest eigenpairs of the symmetric normalized Laplacian, ascending, with
// orthonormal eigenvector columns.
struct Spectrum {
    Vector values;
    Matrix vectors;
};

Matrix normalized_laplacian(const Matrix& w, const Vector& inv_sqrt_d) {
    Matrix l = -(inv_sqrt_d.asDiagonal() * w * inv_sqrt_d.asDiagonal());
    l.diagonal().array() += 1.0;
    return 0.5 * (l + l.transpose());
}

Spectrum dense_spectrum(const Matrix& l) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(l);
    if (solver.info() != Eigen::Success) throw SolverFailure("fiedler_embedding: dense eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// Block inverse iteration on L + sigma I with a sparse LDL^T factor,
// Rayleigh-Ritz after every step. Returns the leading `block` Ritz pairs.
std::optional<Spectrum> subspace_spectrum(const Matrix& l, Index block, const FiedlerOptions& options) {
    const Index n = l.rows();
    constexpr double shift = 1e-6;
    Eigen::SparseMatrix<double> m = l.sparseView(0.0, 0.0);
    for (Index i = 0; i < n; ++i) m.coeffRef(i, i) += shift;
    m.makeCompressed();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
    if (ldlt.info() != Eigen::Success) throw SolverFailure("fiedler_embedding: shifted factorization failed");

    // Deterministic start: smooth, linearly independent columns.
    Matrix x(n, block);
    for (Index c = 0; c < block; ++c)
        for (Index i = 0; i < n; ++i)
            x(i, c) = std::cos(static_cast<double>((c + 1) * (i + 1)) * 0.7071067811865476);

    for (int it = 0; it < options.max_iterations; ++it) {
        x = ldlt.solve(x);
        if (ldlt.info() != Eigen::Success) throw SolverFailure("fiedler_embedding: shifted solve failed");
        Eigen::HouseholderQR<Matrix> qr(x);
        x = qr.householderQ() * Matrix::Identity(n, block);
        const Matrix h = x.transpose() * l * x;
        Eigen::SelfAdjointEigenSolver<Matrix> small(0.5 * (h + h.transpose()));
        x = x * small.eigenvectors();
        const Vector& theta = small.eigenvalues();

        // Everything tied with the second Ritz value must be converged, and
        // one vector beyond the cluster must exist to show the cluster is complete.
        Index needed = 2;
        while (needed < block && theta[needed] <= theta[1] + options.cluster_tolerance) ++needed;
        if (needed >= block) return std::nullopt;
        bool converged = true;
        for (Index c = 0; c < needed && converged; ++c)
            converged = (l * x.col(c) - theta[c] * x.col(c)).norm() <= options.iteration_tolerance;
        if (converged) return Spectrum{theta, x};
    }
    throw SolverFailure("fiedler_embedding: subspace iteration did not converge");
}

// Orthonormal basis of span(cols) restricted to the complement of u0.
Matrix deflated_basis(const Matrix& cols, const Vector& u0) {
    Matrix p = cols - u0 * (u0.transpose() * cols);
    Eigen::ColPivHouseholderQR<Matrix> qr(p);
    qr.setThreshold(1e-8);
    const Index rank = qr.rank();
    Matrix q = qr.householderQ() * Matrix::Identity(p.rows(), rank);
    return q;
}

FiedlerEmbedding from_spectrum(const Spectrum& spec, const Matrix& l, const Vector& d,
                               const FiedlerOptions& options) {
    const Index n = d.size();
    const Vector sqrt_d = d.cwiseSqrt();
    const Vector u0 = sqrt_d / sqrt_d.norm();

    Index m = 2;
    while (m < spec.values.size() && spec.values[m] <= spec.values[1] + options.cluster_tolerance) ++m;
    const Matrix basis = deflated_basis(spec.vectors.leftCols(m), u0);
    if (basis.cols() < 1) throw SolverFailure("fiedler_embedding: eigenspace collapsed under deflation");

    Vector f;
    if (basis.cols() == 1) {
        f = basis.col(0);
    } else {
        // Repeated eigenvalue: project fixed targets onto the eigenspace.
        const Vector targets[] = {
            sqrt_d.cwiseProduct(d),
            sqrt_d.cwiseProduct(Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1))),
        };
        for (const Vector& t : targets) {
            f = basis * (basis.transpose() * t);
            if (f.norm() > 1e-8 * t.norm()) break;
        }
        if (f.norm() == 0.0) f = basis.col(0);
    }
    f -= u0 * u0.dot(f);
    f /= f.norm();

    FiedlerEmbedding out;
    out.multiplicity = static_cast<int>(basis.cols());
    out.eigenvalue = f.dot(l * f);
    out.y = f.cwiseQuotient(sqrt_d);

    const double biggest = out.y.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i)
        if (std::abs(out.y[i]) >= biggest * (1.0 - 1e-9)) {
            if (out.y[i] < 0.0) out.y = -out.y;
            break;
        }
    out.norm_residual = std::abs(out.y.dot(d.cwiseProduct(out.y)) - 1.0);
    out.balance_residual = std::abs(out.y.dot(d));
    return out;
}

}  // namespace

FiedlerEmbedding fiedler_embedding(const Matrix& w, const FiedlerOptions& options) {
    const Vector d = checked_degrees(w);
    const Vector inv_sqrt_d = d.cwiseSqrt().cwiseInverse();
    const Matrix l = normalized_laplacian(w, inv_sqrt_d);
    if (w.rows() <= options.dense_limit) return from_spectrum(dense_spectrum(l), l, d, options);

    for (Index block = 8; block <= w.rows(); block *= 2) {
        if (auto spec = subspace_spectrum(l, block, options)) return from_spectrum(*spec, l, d, options);
    }
    return from_spectrum(dense_spectrum(l), l, d, options);
}

FiedlerEmbedding fiedler_embedding(const AffinityMatrix& w, const FiedlerOptions& options) {
    return fiedler_embedding(w.weights(), options);
}

FiedlerEmbedding fiedler_embedding(const SparseAffinity& w, const FiedlerOptions& options) {
    return fiedler_embedding(w.weights(), options);
}

FiedlerSplit split_fiedler(const Vector& y, double s) {
    FiedlerSplit out;
    for (Index i = 0; i < y.size(); ++i) (y[i] <= s ? out.lower : out.upper).push_back(i);
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InvalidArgument("median of an empty set");
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    if (values.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(values.begin(), mid);
    return 0.5 * (lower + upper);
}

Polarization polarization(const Vector& y) {
    const auto split = split_fiedler(y, 0.0);
    if (split.lower.empty() || split.upper.empty()) return {0.0, 0.0, true};
    std::vector<double> lo, hi;
    for (Index i : split.lower) lo.push_back(y[i]);
    for (Index i : split.upper) hi.push_back(y[i]);
    const double s = median(std::move(lo)) - median(std::move(hi));
    return {std::abs(s), s, false};
}

double polarization_score(const FiedlerEmbedding& embedding) { return polarization(embedding.y).score; }

void PenaltySearchConfig::validate() const {
    if (!(rho_min0 > 0.0) || !(rho_max0 > rho_min0) || !std::isfinite(rho_max0))
        throw InvalidArgument("penalty search: need 0 < rho_min0 < rho_max0");
    if (n_rho0 < 3 || n_rho < 3) throw InvalidArgument("penalty search: grid sizes must be at least 3");
    if (spline_samples < 2) throw InvalidArgument("penalty search: spline_samples must be at least 2");
}

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    if (x_.size() != y_.size() || x_.size() < 3)
        throw InvalidArgument("spline: need at least three (x, y) pairs");
    for (std::size_t i = 1; i < x_.size(); ++i)
        if (!(x_[i] > x_[i - 1])) throw InvalidArgument("spline: x must be strictly increasing");
    gsl_set_error_handler_off();
    auto* spline = gsl_spline_alloc(gsl_interp_cspline, x_.size());
    auto* accel = gsl_interp_accel_alloc();
    spline_ = spline;
    accel_ = accel;
    if (!spline || !accel || gsl_spline_init(spline, x_.data(), y_.data(), x_.size()) != GSL_SUCCESS) {
        if (spline) gsl_spline_free(spline);
        if (accel) gsl_interp_accel_free(accel);
        throw SolverFailure("spline: initialization failed");
    }
}

NaturalCubicSpline::~NaturalCubicSpline() {
    if (spline_) gsl_spline_free(static_cast<gsl_spline*>(spline_));
    if (accel_) gsl_interp_accel_free(static_cast<gsl_interp_accel*>(accel_));
    spline_ = nullptr;
    accel_ = nullptr;
}

double NaturalCubicSpline::operator()(double x) const {
    x = std::clamp(x, x_.front(), x_.back());
    // The accelerator caches a bracket index and is not thread-safe to share,
    // so evaluation goes without it.
    return gsl_spline_eval(static_cast<const gsl_spline*>(spline_), x, nullptr);
}

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<Polarization> evaluate_all(const PenaltyEvaluator& evaluate, const std::vector<double>& rhos,
                                       bool parallel) {
    const auto count = static_cast<std::ptrdiff_t>(rhos.size());
    std::vector<Polarization> out(rhos.size());
    std::vector<std::exception_ptr> errors(rhos.size());
#if defined(SPARCODE_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = evaluate(rhos[static_cast<std::size_t>(i)]);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    (void)parallel;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!errors[i]) continue;
        try {
            std::rethrow_exception(errors[i]);
        } catch (const NumericalError& e) {
            throw SolverFailure("penalty candidate rho=" + std::to_string(rhos[i]) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

PenaltySearchResult select_penalty(const PenaltyEvaluator& evaluate, const PenaltySearchConfig& config,
                                   bool parallel) {
    config.validate();
    PenaltySearchResult result;

    const auto coarse = linspace(config.rho_min0, config.rho_max0, config.n_rho0);
    const auto coarse_scores = evaluate_all(evaluate, coarse, parallel);
    std::size_t best = 0;
    bool any_nonzero = false;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        result.scores.push_back({coarse[i], coarse_scores[i].score, coarse_scores[i].signed_score, 0});
        any_nonzero = any_nonzero || coarse_scores[i].score != 0.0;
        if (coarse_scores[i].score > coarse_scores[best].score) best = i;
    }
    if (!any_nonzero) throw AllScoresZero("every penalty candidate produced a one-sided split");

    const std::size_t left = best == 0 ? 0 : best - 1;
    const std::size_t right = std::min(best + 1, coarse.size() - 1);
    result.refined_min = coarse[left];
    result.refined_max = coarse[right];
    auto refined = linspace(result.refined_min, result.refined_max, config.n_rho);

    // Refined points that coincide with coarse samples reuse their scores.
    std::vector<std::optional<Polarization>> known(refined.size());
    std::vector<double> pending;
    for (std::size_t r = 0; r < refined.size(); ++r)
        for (std::size_t c = left; c <= right; ++c)
            if (std::abs(refined[r] - coarse[c]) <= 1e-12 * coarse[c]) {
                refined[r] = coarse[c];
                known[r] = coarse_scores[c];
            }
    for (std::size_t r = 0; r < refined.size(); ++r)
        if (!known[r]) pending.push_back(refined[r]);
    const auto fresh = evaluate_all(evaluate, pending, parallel);
    std::vector<double> refined_scores(refined.size());
    for (std::size_t r = 0, next = 0; r < refined.size(); ++r) {
        const Polarization p = known[r] ? *known[r] : fresh[next++];
        refined_scores[r] = p.score;
        result.scores.push_back({refined[r], p.score, p.signed_score, 1});
    }

    const NaturalCubicSpline spline(refined, refined_scores);
    auto samples = linspace(result.refined_min, result.refined_max, config.spline_samples);
    samples.insert(samples.end(), refined.begin(), refined.end());
    std::sort(samples.begin(), samples.end());
    samples.erase(std::unique(samples.begin(), samples.end()), samples.end());
    std::vector<double> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) values[i] = spline(samples[i]);

    const double peak = *std::max_element(values.begin(), values.end());
    const double slack = 1e-12 * std::max(1.0, std::abs(peak));
    std::size_t first = 0;
    while (values[first] < peak - slack) ++first;
    std::size_t last = first;
    while (last + 1 < values.size() && values[last + 1] >= peak - slack) ++last;
    result.rho_hat = std::clamp(0.5 * (samples[first] + samples[last]), result.refined_min, result.refined_max);
    result.spline_peak = spline(result.rho_hat);
    return result;
}

Polarization evaluate_penalty(const CovarianceMatrix& s, double rho, const GlassoOptions& glasso_options,
                              const FiedlerOptions& fiedler_options) {
    const auto estimate = glasso(s, rho, glasso_options);
    const auto sparse = sparse_affinity(estimate);
    const Matrix& w = sparse.weights();
    std::vector<Index> keep;
    for (Index i = 0; i < w.rows(); ++i)
        if ((w.row(i).array() > 0.0).any()) keep.push_back(i);
    if (keep.size() < 3) return {0.0, 0.0, true};
    const auto k = static_cast<Index>(keep.size());
    Matrix sub(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) sub(a, b) = w(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
    return polarization(fiedler_embedding(sub, fiedler_options).y);
}

PenaltySearchResult select_penalty(const AffinityMatrix& w, const PenaltySearchConfig& config,
                                   const GlassoOptions& glasso_options, CovarianceScaling scaling,
                                   bool parallel) {
    const auto s = scaling == CovarianceScaling::correlation ? sample_correlation(w) : sample_covariance(w);
    return select_penalty([&](double rho) { return evaluate_penalty(s, rho, glasso_options); }, config,
                          parallel);
}

}  // namespace sparcode
