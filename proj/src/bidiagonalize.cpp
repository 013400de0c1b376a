#include "bdup/bidiagonalize.hpp"

#include "bdup/bgu.hpp"
#include "bdup/householder.hpp"

#include <cmath>

namespace bdup {
namespace {

// H = I - 2 v v^T applied from the left to W(k:末, c0:cols), v unit over rows k..m-1.
void apply_left(Matrix& W, const Vector& v, Index k, Index c0, std::uint64_t& mults) {
    const Index len = W.rows() - k;
    const Index nc = W.cols() - c0;
    if (nc <= 0) return;
    Eigen::RowVectorXd w = v.segment(k, len).transpose() * W.block(k, c0, len, nc);
    W.block(k, c0, len, nc).noalias() -= (2.0 * v.segment(k, len)) * w;
    mults += static_cast<std::uint64_t>(2 * len * nc + len);
}

// applied from the right to W(r0:rows, k:cols)
void apply_right(Matrix& W, const Vector& v, Index k, Index r0, std::uint64_t& mults) {
    const Index len = W.cols() - k;
    const Index nr = W.rows() - r0;
    if (nr <= 0) return;
    Vector w = W.block(r0, k, nr, len) * v.segment(k, len);
    W.block(r0, k, nr, len).noalias() -= w * (2.0 * v.segment(k, len)).transpose();
    mults += static_cast<std::uint64_t>(2 * len * nr + len);
}

BidiagResult bidiagonalize_tall(const Matrix& A) {
    const Index m = A.rows(), n = A.cols();
    BidiagResult res;
    res.Q = Matrix::Identity(m, m);
    res.P = Matrix::Identity(n, n);
    res.B = BidiagonalMatrix(m, n);

    Matrix W = A;
    for (Index k = 0; k < n; ++k) {
        if (m - k >= 2) {
            HouseReflection h = house(W.col(k), k);
            res.mults += static_cast<std::uint64_t>(2 * (m - k));
            W.col(k).tail(m - k).setZero();
            W(k, k) = h.alpha;
            apply_left(W, h.y.essential, k, k + 1, res.mults);
            apply_right(res.Q, h.y.essential, k, 0, res.mults);
        }
        if (k <= n - 3) {
            HouseReflection h = house(W.row(k).transpose(), k + 1);
            res.mults += static_cast<std::uint64_t>(2 * (n - k - 1));
            W.row(k).tail(n - k - 1).setZero();
            W(k, k + 1) = h.alpha;
            apply_right(W, h.y.essential, k + 1, k + 1, res.mults);
            apply_right(res.P, h.y.essential, k + 1, 0, res.mults);
        }
    }
    for (Index i = 0; i < n; ++i) {
        res.B.alpha(i) = W(i, i);
        if (i < n - 1) res.B.beta(i) = W(i, i + 1);
    }
    return res;
}

}  // namespace

BidiagResult bidiagonalize_dense(const Matrix& A) {
    if (A.rows() < 1 || A.cols() < 1)
        throw std::invalid_argument("bidiagonalize_dense: empty matrix");
    if (A.rows() >= A.cols()) return bidiagonalize_tall(A);

    // short-fat case: factor A^T, then flip the resulting lower bidiagonal
    // back to upper with rows rotations
    BidiagResult tr = bidiagonalize_tall(A.transpose());
    const Index m = A.rows(), n = A.cols();
    BidiagResult res;
    res.Q = tr.P;  // m x m
    res.P = tr.Q;  // n x n
    res.B = BidiagonalMatrix(m, n);
    res.mults = tr.mults;

    // L = tr.B^T is lower bidiagonal; a(i) its diagonal, b(i) its subdiagonal
    Vector a = tr.B.alpha;
    Vector b = tr.B.beta;
    for (Index i = 0; i + 1 < m; ++i) {
        auto [c, s] = givens(b(i), a(i));
        const double r = s * b(i) + c * a(i);
        res.B.alpha(i) = r;
        res.B.beta(i) = s * a(i + 1);
        a(i + 1) = c * a(i + 1);
        res.mults += 4;
        // fold G^T into the columns (i+1, i) of Q
        Vector qi1 = res.Q.col(i + 1), qi = res.Q.col(i);
        res.Q.col(i + 1) = c * qi1 - s * qi;
        res.Q.col(i) = s * qi1 + c * qi;
        res.mults += static_cast<std::uint64_t>(4 * m);
    }
    res.B.alpha(m - 1) = a(m - 1);
    return res;
}

}  // namespace bdup
