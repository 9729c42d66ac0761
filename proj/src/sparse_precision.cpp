#include "sparcode/sparse_precision.hpp"

#include "sparcode/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparcode {

CovarianceMatrix::CovarianceMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() != values_.cols()) throw DimensionMismatch("covariance must be square");
    if (!values_.allFinite()) throw InvalidArgument("covariance has non-finite entries");
    const double scale = std::max(1.0, values_.cwiseAbs().maxCoeff());
    if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("covariance is not symmetric");
    if ((values_.diagonal().array() < 0.0).any()) throw InvalidArgument("covariance has a negative diagonal");
}

CovarianceMatrix sample_covariance(const AffinityMatrix& w, kernels::Execution exec) {
    if (w.size() < 2) throw DimensionMismatch("sample covariance needs n >= 2");
    Matrix s = kernels::column_covariance(w.weights(), exec);
    s = 0.5 * (s + s.transpose()).eval();
    return CovarianceMatrix(std::move(s));
}

CovarianceMatrix sample_correlation(const AffinityMatrix& w, kernels::Execution exec) {
    Matrix s = sample_covariance(w, exec).values();
    const Index n = s.rows();
    const double scale = std::max(1.0, s.diagonal().maxCoeff());
    Vector inv_sd(n);
    for (Index i = 0; i < n; ++i) {
        const double v = s(i, i);
        inv_sd[i] = v > 1e-300 * scale ? 1.0 / std::sqrt(v) : 0.0;
    }
    Matrix r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
    r = 0.5 * (r + r.transpose()).eval();
    r = r.cwiseMax(-1.0).cwiseMin(1.0);
    r.diagonal().setOnes();
    return CovarianceMatrix(std::move(r));
}

double glasso_objective(const Matrix& s, const Matrix& theta, double rho, bool penalize_diagonal) {
    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    double l1 = theta.cwiseAbs().sum();
    if (!penalize_diagonal) l1 -= theta.diagonal().cwiseAbs().sum();
    return logdet - s.cwiseProduct(theta).sum() - rho * l1;
}

namespace {

// theta assembled column by column from the working covariance and the lasso
// coefficients, then symmetrized.
Matrix assemble_theta(const Matrix& w, const Matrix& beta) {
    const Index n = w.rows();
    Matrix theta(n, n);
    for (Index j = 0; j < n; ++j) {
        double quad = 0.0;
        for (Index k = 0; k < n; ++k)
            if (k != j) quad += w(k, j) * beta(k, j);
        const double tjj = 1.0 / (w(j, j) - quad);
        theta.col(j) = -beta.col(j) * tjj;
        theta(j, j) = tjj;
    }
    return 0.5 * (theta + theta.transpose());
}

class ColumnLasso {
public:
    ColumnLasso(const Matrix& w, const Matrix& s, double rho, double tol, int max_passes)
        : w_(w), s_(s), rho_(rho), tol_(tol), max_passes_(max_passes), wb_(w.rows()) {}

    // Solves min_b 1/2 b'W11 b - b's12 + rho |b|_1 in place by cyclic
    // coordinate descent; afterwards wb() holds W b (entries other than j).
    // Passes alternate between all coordinates and the current support; the
    // support passes run on a compact copy of W restricted to it.
    void solve(Index j, Eigen::Ref<Vector> b) {
        recompute_wb(b);
        int passes = 0;
        while (passes < max_passes_) {
            const double full = sweep_all(j, b);
            ++passes;
            if (full < tol_) break;
            passes += solve_on_support(j, b, max_passes_ - passes);
        }
    }

    const Vector& wb() const noexcept { return wb_; }

private:
    static double soft(double r, double rho) {
        if (r > rho) return r - rho;
        if (r < -rho) return r + rho;
        return 0.0;
    }

    void recompute_wb(const Eigen::Ref<Vector>& b) {
        wb_.setZero();
        for (Index k = 0; k < b.size(); ++k)
            if (b[k] != 0.0) wb_.noalias() += w_.col(k) * b[k];
    }

    double sweep_all(Index j, Eigen::Ref<Vector> b) {
        double biggest = 0.0;
        for (Index k = 0; k < w_.rows(); ++k) {
            if (k == j) continue;
            const double wkk = w_(k, k);
            const double old = b[k];
            const double next = soft(s_(k, j) - wb_[k] + wkk * old, rho_) / wkk;
            if (next == old) continue;
            b[k] = next;
            wb_.noalias() += w_.col(k) * (next - old);
            biggest = std::max(biggest, wkk * std::abs(next - old));
        }
        return biggest;
    }

    // Coordinate descent over the nonzero coordinates only; returns the
    // passes used.
    int solve_on_support(Index j, Eigen::Ref<Vector> b, int budget) {
        active_.clear();
        for (Index k = 0; k < b.size(); ++k)
            if (b[k] != 0.0) active_.push_back(k);
        const auto m = static_cast<Index>(active_.size());
        if (m == 0) return 0;
        waa_.resize(m, m);
        ga_.resize(m);
        ba_.resize(m);
        sa_.resize(m);
        for (Index a = 0; a < m; ++a) {
            const Index ka = active_[static_cast<std::size_t>(a)];
            for (Index c = 0; c < m; ++c) waa_(c, a) = w_(active_[static_cast<std::size_t>(c)], ka);
            ga_[a] = wb_[ka];
            ba_[a] = b[ka];
            sa_[a] = s_(ka, j);
        }
        int passes = 0;
        while (passes < budget) {
            double biggest = 0.0;
            for (Index a = 0; a < m; ++a) {
                const double waa = waa_(a, a);
                const double old = ba_[a];
                const double next = soft(sa_[a] - ga_[a] + waa * old, rho_) / waa;
                if (next == old) continue;
                ba_[a] = next;
                ga_.noalias() += waa_.col(a) * (next - old);
                biggest = std::max(biggest, waa * std::abs(next - old));
            }
            ++passes;
            if (biggest < tol_) break;
        }
        for (Index a = 0; a < m; ++a) b[active_[static_cast<std::size_t>(a)]] = ba_[a];
        recompute_wb(b);
        return passes;
    }

    const Matrix& w_;
    const Matrix& s_;
    double rho_;
    double tol_;
    int max_passes_;
    Vector wb_;
    std::vector<Index> active_;
    Matrix waa_;
    Vector ga_, ba_, sa_;
};

struct BlockSolution {
    Matrix w;
    Matrix beta;
    int iterations = 0;
    bool converged = false;
    double last_change = 0.0;
};

BlockSolution solve_block(const Matrix& s, double rho, double scale, const GlassoOptions& options,
                          std::vector<double>* trace) {
    const Index n = s.rows();
    BlockSolution b;
    // W starts at S + rho I and beta at 0, so theta starts at (diag(S) + rho)^-1.
    // Starting W anywhere else (a diagonal W, say) can leave the working
    // covariance indefinite after the first column update.
    b.w = s;
    for (Index i = 0; i < n; ++i) {
        if (options.penalize_diagonal) b.w(i, i) += rho;
        if (!(b.w(i, i) > 0.0)) throw NotPositiveDefinite("glasso: zero diagonal without diagonal penalty");
    }
    b.beta = Matrix::Zero(n, n);
    if (n == 1) {
        b.converged = true;
        return b;
    }

    ColumnLasso lasso(b.w, s, rho, options.tol * scale, options.max_inner_passes);
    if (trace) trace->push_back(glasso_objective(s, assemble_theta(b.w, b.beta), rho, options.penalize_diagonal));
    for (int sweep = 1; sweep <= options.max_iter; ++sweep) {
        double change = 0.0;
        for (Index j = 0; j < n; ++j) {
            lasso.solve(j, b.beta.col(j));
            const Vector& wb = lasso.wb();
            for (Index k = 0; k < n; ++k) {
                if (k == j) continue;
                change += std::abs(wb[k] - b.w(k, j));
                b.w(k, j) = wb[k];
                b.w(j, k) = wb[k];
            }
        }
        change /= static_cast<double>(n * (n - 1));
        b.iterations = sweep;
        b.last_change = change;
        if (trace) trace->push_back(glasso_objective(s, assemble_theta(b.w, b.beta), rho, options.penalize_diagonal));
        if (change < options.tol) {
            b.converged = true;
            break;
        }
    }
    return b;
}

// Connected components of the graph |S_ij| > rho. The solution is block
// diagonal over them, so each block is solved on its own.
std::vector<std::vector<Index>> screening_blocks(const Matrix& s, double rho) {
    const Index n = s.rows();
    std::vector<Index> component(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<Index>> blocks;
    for (Index root = 0; root < n; ++root) {
        if (component[static_cast<std::size_t>(root)] >= 0) continue;
        const auto id = static_cast<Index>(blocks.size());
        blocks.push_back({root});
        component[static_cast<std::size_t>(root)] = id;
        for (std::size_t head = 0; head < blocks.back().size(); ++head) {
            const Index i = blocks.back()[head];
            for (Index j = 0; j < n; ++j)
                if (component[static_cast<std::size_t>(j)] < 0 && j != i && std::abs(s(i, j)) > rho) {
                    component[static_cast<std::size_t>(j)] = id;
                    blocks.back().push_back(j);
                }
        }
        std::sort(blocks.back().begin(), blocks.back().end());
    }
    return blocks;
}

}  // namespace

PrecisionEstimate glasso(const CovarianceMatrix& cov, double rho, const GlassoOptions& options) {
    if (!(rho > 0.0)) throw InvalidArgument("glasso: rho must be positive");
    if (!(options.tol > 0.0)) throw InvalidArgument("glasso: tol must be positive");
    if (options.max_iter < 1) throw InvalidArgument("glasso: max_iter must be at least 1");
    const Matrix& s = cov.values();
    const Index n = s.rows();
    if (n < 1) throw DimensionMismatch("glasso: empty covariance");

    {
        Matrix regularized = s;
        regularized.diagonal().array() += rho;
        Eigen::LLT<Matrix> llt(regularized);
        if (llt.info() != Eigen::Success) throw NotPositiveDefinite("glasso: S + rho I is not positive definite");
    }

    // The outer test is the plain mean |change in W| per sweep. The column
    // lassos get a tolerance relative to the mean off-diagonal |S|; with the
    // absolute value they either stop early on small-scale S or grind on
    // large-scale S.
    double scale = n > 1 ? (s.cwiseAbs().sum() - s.diagonal().cwiseAbs().sum()) / static_cast<double>(n * (n - 1)) : 1.0;
    if (!(scale > 0.0)) scale = 1.0;

    PrecisionEstimate out;
    out.rho = rho;
    out.converged = true;
    // The objective trace needs whole-matrix iterates, so recording it turns
    // screening off.
    const auto blocks = options.record_objective
                            ? std::vector<std::vector<Index>>{[n] {
                                  std::vector<Index> all(static_cast<std::size_t>(n));
                                  std::iota(all.begin(), all.end(), Index{0});
                                  return all;
                              }()}
                            : screening_blocks(s, rho);

    Matrix w = Matrix::Zero(n, n);
    Matrix beta = Matrix::Zero(n, n);
    for (const auto& block : blocks) {
        const auto m = static_cast<Index>(block.size());
        Matrix sb(m, m);
        for (Index a = 0; a < m; ++a)
            for (Index c = 0; c < m; ++c) sb(a, c) = s(block[static_cast<std::size_t>(a)], block[static_cast<std::size_t>(c)]);
        const auto solved = solve_block(sb, rho, scale, options, options.record_objective ? &out.objective_trace : nullptr);
        for (Index a = 0; a < m; ++a)
            for (Index c = 0; c < m; ++c) {
                w(block[static_cast<std::size_t>(a)], block[static_cast<std::size_t>(c)]) = solved.w(a, c);
                beta(block[static_cast<std::size_t>(a)], block[static_cast<std::size_t>(c)]) = solved.beta(a, c);
            }
        out.iterations = std::max(out.iterations, solved.iterations);
        out.last_change = std::max(out.last_change, solved.last_change);
        out.converged = out.converged && solved.converged;
    }

    out.theta = assemble_theta(w, beta);
    out.covariance = std::move(w);
    double l1 = out.theta.cwiseAbs().sum();
    if (!options.penalize_diagonal) l1 -= out.theta.diagonal().cwiseAbs().sum();
    out.dual_gap = s.cwiseProduct(out.theta).sum() + rho * l1 - static_cast<double>(n);
    return out;
}

SparseAffinity::SparseAffinity(Matrix weights, double rho) : weights_(std::move(weights)), rho_(rho) {
    if (!is_valid_affinity(weights_) || (weights_.array() < 0.0).any())
        throw InvalidArgument("sparse affinity must be symmetric, nonnegative, zero-diagonal");
}

SparseAffinity sparse_affinity(const PrecisionEstimate& estimate) {
    const Matrix mag = estimate.theta.cwiseAbs();
    Matrix w = 0.5 * (mag + mag.transpose());
    w.diagonal().setZero();
    return SparseAffinity(std::move(w), estimate.rho);
}

}  // namespace sparcode
