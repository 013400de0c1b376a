#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Upper bidiagonal band of a logical m x n matrix: t = min(m, n) diagonal
/// entries alpha(0..t-1) and t-1 superdiagonal entries beta(0..t-2).
/// beta(-1) is treated as 0 throughout.
struct BidiagonalMatrix {
    Index rows = 0;
    Index cols = 0;
    Vector alpha;
    Vector beta;

    BidiagonalMatrix() = default;
    BidiagonalMatrix(Index m, Index n)
        : rows(m), cols(n), alpha(Vector::Zero(std::min(m, n))),
          beta(Vector::Zero(std::max<Index>(std::min(m, n) - 1, 0))) {
        if (m < 1 || n < 1) throw std::invalid_argument("BidiagonalMatrix: dimensions must be >= 1");
    }

    Index t() const { return std::min(rows, cols); }

    /// beta entry above alpha(i), i.e. B(i-1, i); zero for i == 0.
    double beta_above(Index i) const { return i > 0 ? beta(i - 1) : 0.0; }

    /// Squared norm of column i of the band: alpha_i^2 + beta_{i-1}^2.
    double pair_norm_sq(Index i) const {
        const double b = beta_above(i);
        return alpha(i) * alpha(i) + b * b;
    }

    double frobenius_sq() const { return alpha.squaredNorm() + beta.squaredNorm(); }

    Matrix dense() const {
        Matrix B = Matrix::Zero(rows, cols);
        for (Index i = 0; i < t(); ++i) {
            B(i, i) = alpha(i);
            if (i + 1 < cols && i < t() - 1) B(i, i + 1) = beta(i);
        }
        // for m < n the band stops at beta(t-2); column t..n-1 stay zero
        return B;
    }

    bool operator==(const BidiagonalMatrix& o) const {
        return rows == o.rows && cols == o.cols && alpha == o.alpha && beta == o.beta;
    }
};

struct SvdTriple {
    Matrix U;       // m x t, orthonormal columns
    Vector sigma;   // t, nonincreasing, nonnegative
    Matrix V;       // n x t, orthonormal columns
};

/// Thrown when an iteration fails to converge; carries the best iterate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, SvdTriple best)
        : std::runtime_error(what), best_iterate(std::move(best)) {}
    SvdTriple best_iterate;
};

/// || Q^T Q - I ||_F for a factor with (supposedly) orthonormal columns.
inline double orthogonality_drift(const Matrix& Q) {
    const Index k = Q.cols();
    return (Q.transpose() * Q - Matrix::Identity(k, k)).norm();
}

}  // namespace bdup
