#pragma once

// Random instances and brute-force reference implementations shared by the
// unit tests and the acceptance binary. The oracles are deliberately naive:
// plain loops over the defining formulas, nothing shared with the library.

#include "sparcode/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sparcode::testing {

inline Matrix random_symmetric_weights(Index n, std::mt19937_64& rng, double density = 1.0) {
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    std::bernoulli_distribution keep(density);
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            if (keep(rng)) w(i, j) = w(j, i) = weight(rng);
    return w;
}

// A random spanning tree plus extra random edges, so the graph is connected.
inline Matrix random_connected_graph(Index n, std::mt19937_64& rng, double extra_density = 0.3) {
    Matrix w = random_symmetric_weights(n, rng, extra_density);
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    for (Index i = 1; i < n; ++i) {
        std::uniform_int_distribution<Index> parent(0, i - 1);
        const Index p = parent(rng);
        if (w(i, p) == 0.0) w(i, p) = w(p, i) = weight(rng);
    }
    return w;
}

inline std::vector<int> random_labels(Index n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(1, k);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = pick(rng);
    return labels;
}

// Q = 1/(2g) sum_{j,m} [w_jm - v_j v_m / (2g)] delta(c_j, c_m), every ordered
// pair including j = m.
inline double modularity_oracle(const Matrix& w, const std::vector<int>& labels) {
    const Index n = w.rows();
    double two_g = 0.0;
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (Index j = 0; j < n; ++j)
        for (Index m = 0; m < n; ++m) {
            v[static_cast<std::size_t>(j)] += w(j, m);
            two_g += w(j, m);
        }
    double q = 0.0;
    for (Index j = 0; j < n; ++j)
        for (Index m = 0; m < n; ++m)
            if (labels[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(m)])
                q += w(j, m) - v[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(m)] / two_g;
    return q / two_g;
}

// Two-pass covariance of the columns, 1/(rows-1).
inline Matrix covariance_oracle(const Matrix& w) {
    const Index r = w.rows();
    const Index c = w.cols();
    std::vector<double> mean(static_cast<std::size_t>(c), 0.0);
    for (Index j = 0; j < c; ++j) {
        for (Index i = 0; i < r; ++i) mean[static_cast<std::size_t>(j)] += w(i, j);
        mean[static_cast<std::size_t>(j)] /= static_cast<double>(r);
    }
    Matrix s(c, c);
    for (Index a = 0; a < c; ++a)
        for (Index b = 0; b < c; ++b) {
            double sum = 0.0;
            for (Index i = 0; i < r; ++i)
                sum += (w(i, a) - mean[static_cast<std::size_t>(a)]) * (w(i, b) - mean[static_cast<std::size_t>(b)]);
            s(a, b) = sum / static_cast<double>(r - 1);
        }
    return s;
}

// Sort each column, then average across each row.
inline std::vector<double> aggregate_oracle(const Matrix& w) {
    const Index n = w.rows();
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(w.cols()));
    for (Index j = 0; j < w.cols(); ++j) {
        for (Index i = 0; i < n; ++i) cols[static_cast<std::size_t>(j)].push_back(w(i, j));
        std::sort(cols[static_cast<std::size_t>(j)].begin(), cols[static_cast<std::size_t>(j)].end());
    }
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    for (Index i = 0; i < n; ++i) {
        for (const auto& col : cols) u[static_cast<std::size_t>(i)] += col[static_cast<std::size_t>(i)];
        u[static_cast<std::size_t>(i)] /= static_cast<double>(w.cols());
    }
    return u;
}

// Worst violation of the glasso optimality conditions at theta with W =
// theta^-1: W_ii = S_ii + rho, W_ij - S_ij = rho sign(theta_ij) on the
// support and |W_ij - S_ij| <= rho off it.
inline double kkt_violation(const Matrix& s, const Matrix& theta, double rho) {
    const Matrix w = theta.inverse();
    double worst = 0.0;
    for (Index i = 0; i < s.rows(); ++i)
        for (Index j = 0; j < s.cols(); ++j) {
            const double g = w(i, j) - s(i, j);
            double v;
            if (i == j) v = std::abs(g - rho);
            else if (theta(i, j) != 0.0) v = std::abs(g - rho * (theta(i, j) > 0 ? 1.0 : -1.0));
            else v = std::max(0.0, std::abs(g) - rho);
            worst = std::max(worst, v);
        }
    return worst;
}

// Makes the largest-magnitude entry (first one on ties) positive.
inline Vector sign_normalized(Vector y) {
    Index arg = 0;
    for (Index i = 1; i < y.size(); ++i)
        if (std::abs(y[i]) > std::abs(y[arg]) * (1.0 + 1e-9)) arg = i;
    if (y[arg] < 0.0) y = -y;
    return y;
}

inline Matrix random_covariance(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    const Index samples = 3 * n + 5;
    Matrix x(samples, n);
    for (Index i = 0; i < samples; ++i)
        for (Index j = 0; j < n; ++j) x(i, j) = g(rng);
    // A shared factor couples the first half of the variables.
    for (Index i = 0; i < samples; ++i) {
        const double f = g(rng);
        for (Index j = 0; j < n / 2; ++j) x(i, j) += 0.8 * f;
    }
    return covariance_oracle(x);
}

}  // namespace sparcode::testing
