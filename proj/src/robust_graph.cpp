#include "sparcode/robust_graph.hpp"

#include "sparcode/error.hpp"
#include "sparcode/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sparcode {

Vector aggregate_coefficients(const Matrix& w) {
    if (w.rows() < 2 || w.rows() != w.cols()) throw DimensionMismatch("aggregate_coefficients: need square n >= 2");
    Matrix sorted = w;
    for (Index c = 0; c < sorted.cols(); ++c) std::sort(sorted.col(c).begin(), sorted.col(c).end());
    return sorted.rowwise().mean();
}

Vector aggregate_coefficients(const SparseAffinity& w) { return aggregate_coefficients(w.weights()); }

namespace {

double log_density(double x, double tau, double mean, double variance) {
    const double z = x - mean;
    return std::log(tau) - 0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * z * z / variance;
}

double log_sum(double a, double b) {
    const double hi = std::max(a, b);
    return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

double log_likelihood(const Vector& u, const GmmFit& fit) {
    double ll = 0.0;
    for (double x : u)
        ll += log_sum(log_density(x, fit.tau[0], fit.mean[0], fit.variance[0]),
                      log_density(x, fit.tau[1], fit.mean[1], fit.variance[1]));
    return ll;
}

double sample_variance(const Vector& u) {
    const double m = u.mean();
    return (u.array() - m).square().sum() / static_cast<double>(u.size());
}

}  // namespace

std::array<double, 2> posterior(double u, const GmmFit& fit) {
    const double a = log_density(u, fit.tau[0], fit.mean[0], fit.variance[0]);
    const double b = log_density(u, fit.tau[1], fit.mean[1], fit.variance[1]);
    const double total = log_sum(a, b);
    const double v1 = std::exp(a - total);
    return {v1, 1.0 - v1};
}

GmmFit em_step(const Vector& u, const GmmFit& fit) {
    const auto n = static_cast<double>(u.size());
    std::array<double, 2> weight{}, first{}, second{};
    for (double x : u) {
        const auto r = posterior(x, fit);
        for (int l = 0; l < 2; ++l) {
            weight[l] += r[l];
            first[l] += r[l] * x;
        }
    }
    GmmFit next = fit;
    for (int l = 0; l < 2; ++l) {
        next.tau[l] = weight[l] / n;
        next.mean[l] = weight[l] > 0.0 ? first[l] / weight[l] : fit.mean[l];
    }
    for (double x : u) {
        const auto r = posterior(x, fit);
        for (int l = 0; l < 2; ++l) second[l] += r[l] * (x - next.mean[l]) * (x - next.mean[l]);
    }
    for (int l = 0; l < 2; ++l) next.variance[l] = weight[l] > 0.0 ? second[l] / weight[l] : 0.0;
    return next;
}

GmmFit fit_two_mode_gmm(const Vector& u, const GmmOptions& options) {
    const Index n = u.size();
    if (n < 4) throw NotEnoughPoints("two-mode mixture needs at least 4 samples");
    const double total_variance = sample_variance(u);
    if (!(total_variance > 0.0)) throw DegenerateComponent("two-mode mixture: all samples are identical");
    const double floor = 1e-12 * total_variance;

    std::vector<double> sorted(u.begin(), u.end());
    std::sort(sorted.begin(), sorted.end());
    const auto half = sorted.size() / 2;
    GmmFit fit;
    fit.tau = {0.5, 0.5};
    fit.mean[0] = std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(half), 0.0) /
                  static_cast<double>(half);
    fit.mean[1] = std::accumulate(sorted.begin() + static_cast<std::ptrdiff_t>(half), sorted.end(), 0.0) /
                  static_cast<double>(sorted.size() - half);
    fit.variance = {total_variance / 4.0, total_variance / 4.0};
    fit.log_likelihood.push_back(log_likelihood(u, fit));

    for (int it = 1; it <= options.max_iter; ++it) {
        GmmFit next = em_step(u, fit);
        if (next.variance[0] < floor || next.variance[1] < floor || next.tau[0] <= 0.0 || next.tau[1] <= 0.0)
            throw DegenerateComponent("two-mode mixture: a component collapsed");
        next.log_likelihood = std::move(fit.log_likelihood);
        const double ll = log_likelihood(u, next);
        const double previous = next.log_likelihood.back();
        next.log_likelihood.push_back(ll);
        next.iterations = it;
        fit = std::move(next);
        if (std::abs(ll - previous) <= options.tol * (1.0 + std::abs(ll))) {
            fit.converged = true;
            break;
        }
    }
    if (fit.mean[0] > fit.mean[1]) {
        std::swap(fit.tau[0], fit.tau[1]);
        std::swap(fit.mean[0], fit.mean[1]);
        std::swap(fit.variance[0], fit.variance[1]);
    }
    return fit;
}

double compute_threshold(const Vector& u, const GmmFit& fit) {
    if (u.size() == 0) throw NotEnoughPoints("compute_threshold: no samples");
    double best_u = u[0];
    double best_gap = std::numeric_limits<double>::infinity();
    for (double x : u) {
        const auto r = posterior(x, fit);
        const double gap = std::abs(r[1] - r[0]);
        if (gap < best_gap || (gap == best_gap && x < best_u)) {
            best_gap = gap;
            best_u = x;
        }
    }
    return best_u;
}

RobustGraph prune_and_reject(const Matrix& w, double t) {
    if (std::isnan(t)) throw InvalidArgument("prune_and_reject: threshold is NaN");
    const Index n = w.rows();
    Matrix cut = (w.array() > t).select(w, 0.0);
    RobustGraph out;
    out.threshold = t;
    for (Index i = 0; i < n; ++i) ((cut.row(i).array() != 0.0).any() ? out.kept : out.outliers).push_back(i);
    if (out.kept.size() < 3)
        throw EverythingRejected("only " + std::to_string(out.kept.size()) + " vertices survive the threshold");
    const auto k = static_cast<Index>(out.kept.size());
    out.weights.resize(k, k);
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) out.weights(a, b) = cut(out.kept[static_cast<std::size_t>(a)], out.kept[static_cast<std::size_t>(b)]);
    return out;
}

std::string outlier_report_csv(const Vector& u, const GmmFit* fit, const RobustGraph& graph) {
    std::vector<bool> rejected(static_cast<std::size_t>(u.size()), false);
    for (Index i : graph.outliers) rejected[static_cast<std::size_t>(i)] = true;
    std::string out = "original_index,u,v1,v2,rejected\n";
    for (Index i = 0; i < u.size(); ++i) {
        std::array<double, 2> r{std::nan(""), std::nan("")};
        if (fit) r = posterior(u[i], *fit);
        out += std::to_string(i + 1) + ',' + io::format_double(u[i]) + ',' + io::format_double(r[0]) + ',' +
               io::format_double(r[1]) + ',' + (rejected[static_cast<std::size_t>(i)] ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace sparcode
