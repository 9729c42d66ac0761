#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sparcode {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Community labels are 1-based; 0 is never a valid label.
using Labels = std::vector<int>;

// Feature data: one column per observation, one row per feature.
struct DataMatrix {
    Matrix values;
    std::vector<std::string> column_ids;

    Index features() const { return values.rows(); }
    Index observations() const { return values.cols(); }

    // Throws DimensionMismatch (m < 1, n < 2, label count) or InvalidArgument
    // (non-finite entries).
    void validate() const;
};

// Symmetric weight matrix over n vertices with a zero diagonal. Construction
// enforces the invariants, so every instance in the program satisfies them.
class AffinityMatrix {
public:
    AffinityMatrix() = default;

    // Throws AsymmetryError unless weights(i,j) == weights(j,i) exactly, and
    // InvalidArgument on a nonzero diagonal or non-finite entries.
    explicit AffinityMatrix(Matrix weights);

    // Mirrors the upper triangle, zeroes the diagonal; never throws on
    // asymmetry. Non-finite entries still throw.
    static AffinityMatrix from_upper(const Matrix& weights);

    const Matrix& weights() const noexcept { return weights_; }
    Index size() const noexcept { return weights_.rows(); }

private:
    Matrix weights_;
};

// Checks the three affinity invariants without constructing.
bool is_valid_affinity(const Matrix& w);

}  // namespace sparcode
