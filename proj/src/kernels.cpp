#include "sparcode/kernels.hpp"

#include "sparcode/error.hpp"

#ifdef SPARCODE_HAVE_OPENMP
#include <omp.h>
#endif

#include <vector>

namespace sparcode::kernels {

namespace {

void mirror_upper(Matrix& out) {
    const Index n = out.rows();
    for (Index j = 0; j < n; ++j) {
        out(j, j) = 0.0;
        for (Index i = j + 1; i < n; ++i) out(i, j) = out(j, i);
    }
}

// Row j of the modularity double sum, including the j == m term.
double modularity_row(const Matrix& w, std::span<const int> labels, const Vector& strength,
                      double two_g, Index j) {
    const Index n = w.rows();
    double acc = 0.0;
    for (Index m = 0; m < n; ++m) {
        if (labels[static_cast<std::size_t>(m)] != labels[static_cast<std::size_t>(j)]) continue;
        acc += w(j, m) - strength[j] * strength[m] / two_g;
    }
    return acc;
}

void check_labels(const Matrix& w, std::span<const int> labels) {
    if (w.rows() != w.cols() || static_cast<Index>(labels.size()) != w.rows())
        throw DimensionMismatch("modularity: label count does not match the matrix");
}

}  // namespace

Matrix column_gram_serial(const Matrix& z) {
    const Index n = z.cols();
    Matrix out(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) out(i, j) = z.col(i).dot(z.col(j));
    mirror_upper(out);
    return out;
}

Matrix column_gram_parallel(const Matrix& z) {
    const Index n = z.cols();
    Matrix out(n, n);
#pragma omp parallel for schedule(dynamic, 8)
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) out(i, j) = z.col(i).dot(z.col(j));
    mirror_upper(out);
    return out;
}

Matrix column_gram(const Matrix& z, Execution exec) {
    return exec == Execution::serial ? column_gram_serial(z) : column_gram_parallel(z);
}

namespace {

Matrix centered(const Matrix& w) {
    Matrix c = w;
    for (Index j = 0; j < c.cols(); ++j) c.col(j).array() -= c.col(j).mean();
    return c;
}

template <class Gram>
Matrix covariance_with(const Matrix& w, Gram gram) {
    if (w.rows() < 2) throw DimensionMismatch("covariance needs at least two observations");
    const Matrix c = centered(w);
    Matrix s = gram(c);
    const double scale = 1.0 / static_cast<double>(w.rows() - 1);
    s *= scale;
    for (Index j = 0; j < c.cols(); ++j) s(j, j) = c.col(j).squaredNorm() * scale;
    return s;
}

}  // namespace

Matrix column_covariance_serial(const Matrix& w) {
    return covariance_with(w, column_gram_serial);
}

Matrix column_covariance_parallel(const Matrix& w) {
    return covariance_with(w, column_gram_parallel);
}

Matrix column_covariance(const Matrix& w, Execution exec) {
    return exec == Execution::serial ? column_covariance_serial(w) : column_covariance_parallel(w);
}

double modularity_serial(const Matrix& w, std::span<const int> labels) {
    check_labels(w, labels);
    const Vector strength = w.rowwise().sum();
    const double two_g = strength.sum();
    if (!(two_g > 0.0)) throw EmptyGraph("modularity: total edge weight is zero");
    double q = 0.0;
    for (Index j = 0; j < w.rows(); ++j) q += modularity_row(w, labels, strength, two_g, j);
    return q / two_g;
}

double modularity_parallel(const Matrix& w, std::span<const int> labels) {
    check_labels(w, labels);
    const Vector strength = w.rowwise().sum();
    const double two_g = strength.sum();
    if (!(two_g > 0.0)) throw EmptyGraph("modularity: total edge weight is zero");
    const Index n = w.rows();
    std::vector<double> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j)
        rows[static_cast<std::size_t>(j)] = modularity_row(w, labels, strength, two_g, j);
    double q = 0.0;
    for (double r : rows) q += r;
    return q / two_g;
}

int max_threads() {
#ifdef SPARCODE_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace sparcode::kernels
