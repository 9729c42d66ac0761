#include "sparcode/affinity.hpp"

#include "sparcode/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace sparcode {

void DataMatrix::validate() const {
    if (values.rows() < 1) throw DimensionMismatch("data matrix needs at least one feature");
    if (values.cols() < 2) throw DimensionMismatch("data matrix needs at least two observations");
    if (!column_ids.empty() && static_cast<Index>(column_ids.size()) != values.cols())
        throw DimensionMismatch("column id count does not match the observation count");
    if (!values.allFinite()) throw InvalidArgument("data matrix has non-finite entries");
}

bool is_valid_affinity(const Matrix& w) {
    if (w.rows() != w.cols() || !w.allFinite()) return false;
    for (Index j = 0; j < w.cols(); ++j) {
        if (w(j, j) != 0.0) return false;
        for (Index i = j + 1; i < w.rows(); ++i)
            if (w(i, j) != w(j, i)) return false;
    }
    return true;
}

AffinityMatrix::AffinityMatrix(Matrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) throw DimensionMismatch("affinity matrix must be square");
    if (!weights_.allFinite()) throw InvalidArgument("affinity matrix has non-finite entries");
    for (Index j = 0; j < weights_.cols(); ++j) {
        if (weights_(j, j) != 0.0) throw InvalidArgument("affinity matrix has a nonzero diagonal");
        for (Index i = j + 1; i < weights_.rows(); ++i)
            if (weights_(i, j) != weights_(j, i))
                throw AsymmetryError("affinity matrix is not exactly symmetric");
    }
}

AffinityMatrix AffinityMatrix::from_upper(const Matrix& weights) {
    if (weights.rows() != weights.cols()) throw DimensionMismatch("affinity matrix must be square");
    Matrix w = weights.triangularView<Eigen::StrictlyUpper>();
    w.diagonal().setZero();
    w.triangularView<Eigen::StrictlyLower>() = w.transpose();
    return AffinityMatrix(std::move(w));
}

namespace {

Matrix clamp_unit(Matrix w) {
    w = w.cwiseMax(-1.0).cwiseMin(1.0);
    return w;
}

}  // namespace

AffinityMatrix cosine_affinity(const DataMatrix& data, Execution exec) {
    data.validate();
    Matrix z = data.values;
    for (Index j = 0; j < z.cols(); ++j) {
        const double norm = z.col(j).norm();
        if (norm == 0.0) throw ZeroNormColumn(static_cast<std::size_t>(j));
        z.col(j) /= norm;
    }
    return AffinityMatrix(clamp_unit(kernels::column_gram(z, exec)));
}

AffinityMatrix pearson_affinity(const DataMatrix& data, Execution exec) {
    data.validate();
    Matrix z = data.values;
    for (Index j = 0; j < z.cols(); ++j) {
        const double mean = z.col(j).mean();
        z.col(j).array() -= mean;
        const double norm = z.col(j).norm();
        const double scale = std::max(1.0, std::abs(mean)) * std::sqrt(static_cast<double>(z.rows()));
        if (!(norm > 1e-14 * scale)) throw ConstantColumn(static_cast<std::size_t>(j));
        z.col(j) /= norm;
    }
    return AffinityMatrix(clamp_unit(kernels::column_gram(z, exec)));
}

namespace {

double soft_threshold(double r, double t) {
    if (r > t) return r - t;
    if (r < -t) return r + t;
    return 0.0;
}

struct ColumnFit {
    Vector a;
    int passes = 0;
    std::vector<double> trace;
};

double column_objective(const Matrix& gram, Index j, const Vector& a, const Vector& ga, double lambda) {
    // |a|_1 + lambda/2 (a'Ga - 2 a'g_j + G_jj)
    const double quad = a.dot(ga) - 2.0 * a.dot(gram.col(j)) + gram(j, j);
    return a.lpNorm<1>() + 0.5 * lambda * quad;
}

ColumnFit solve_column(const Matrix& gram, Index j, double lambda, const SparseRepresentationOptions& opt) {
    const Index n = gram.rows();
    ColumnFit fit;
    fit.a = Vector::Zero(n);
    Vector ga = Vector::Zero(n);  // G a
    const double threshold = 1.0 / lambda;
    if (opt.record_objective) fit.trace.push_back(column_objective(gram, j, fit.a, ga, lambda));
    for (int pass = 1; pass <= opt.max_iter; ++pass) {
        double max_change = 0.0;
        for (Index k = 0; k < n; ++k) {
            if (k == j) continue;
            const double gkk = gram(k, k);
            const double old = fit.a[k];
            double updated = 0.0;
            if (gkk > 0.0) {
                const double r = gram(k, j) - (ga[k] - gkk * old);
                updated = soft_threshold(r, threshold) / gkk;
            }
            if (updated != old) {
                ga.noalias() += gram.col(k) * (updated - old);
                fit.a[k] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        if (opt.record_objective) fit.trace.push_back(column_objective(gram, j, fit.a, ga, lambda));
        fit.passes = pass;
        if (max_change <= opt.tol) return fit;
    }
    throw NonConvergence(static_cast<std::size_t>(j), opt.max_iter);
}

}  // namespace

SparseRepresentation sparse_representation_affinity(const DataMatrix& data,
                                                    const SparseRepresentationOptions& options) {
    data.validate();
    if (options.lambda && !(*options.lambda > 0.0))
        throw InvalidArgument("sparse representation: lambda must be positive");
    const Matrix& x = data.values;
    const Index n = x.cols();
    Matrix gram = x.transpose() * x;
    gram = 0.5 * (gram + gram.transpose()).eval();

    std::vector<ColumnFit> fits(static_cast<std::size_t>(n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));

    auto run = [&](Index j) {
        try {
            double lambda = 0.0;
            if (options.lambda) {
                lambda = *options.lambda;
            } else {
                double peak = 0.0;
                for (Index k = 0; k < n; ++k)
                    if (k != j) peak = std::max(peak, std::abs(gram(k, j)));
                lambda = peak > 0.0 ? 10.0 / peak : 1.0;
            }
            fits[static_cast<std::size_t>(j)] = solve_column(gram, j, lambda, options);
        } catch (...) {
            errors[static_cast<std::size_t>(j)] = std::current_exception();
        }
    };

    if (options.exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (Index j = 0; j < n; ++j) run(j);
    } else {
        for (Index j = 0; j < n; ++j) run(j);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    SparseCoefficients coeffs;
    coeffs.coefficients = Matrix::Zero(n, n);
    coeffs.residual_norm.resize(n);
    for (Index j = 0; j < n; ++j) {
        auto& fit = fits[static_cast<std::size_t>(j)];
        coeffs.coefficients.col(j) = fit.a;
        coeffs.coefficients(j, j) = 0.0;
        coeffs.residual_norm[j] = (x.col(j) - x * fit.a).norm();
        coeffs.passes.push_back(fit.passes);
        if (options.record_objective) coeffs.objective_traces.push_back(std::move(fit.trace));
    }

    const Matrix mag = coeffs.coefficients.cwiseAbs();
    Matrix w = 0.5 * (mag + mag.transpose());
    w.diagonal().setZero();
    return {std::move(coeffs), AffinityMatrix(std::move(w))};
}

}  // namespace sparcode
