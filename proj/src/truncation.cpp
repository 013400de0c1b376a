#include "bdup/truncation.hpp"

#include "bdup/jacobi_svd.hpp"

#include <algorithm>
#include <numeric>

namespace bdup {

std::vector<Index> select_truncation(const BidiagonalMatrix& B, Index r, TruncationMode mode) {
    const Index t = B.t();
    if (r < 1 || r > t) throw std::invalid_argument("select_truncation: r out of range");
    std::vector<Index> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), Index{0});
    if (mode == TruncationMode::Prefix) {
        idx.resize(static_cast<std::size_t>(r));
        return idx;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        return B.pair_norm_sq(a) > B.pair_norm_sq(b);
    });
    idx.resize(static_cast<std::size_t>(r));
    std::sort(idx.begin(), idx.end());
    return idx;
}

Matrix reconstruct_truncated(const Matrix& Q, const BidiagonalMatrix& B, const Matrix& P,
                             const std::vector<Index>& indices) {
    Matrix A = Matrix::Zero(Q.rows(), P.rows());
    for (Index i : indices) {
        if (i < 0 || i >= B.t()) throw std::invalid_argument("reconstruct_truncated: index out of range");
        Vector col = B.alpha(i) * Q.col(i);
        if (i > 0) col += B.beta(i - 1) * Q.col(i - 1);
        A.noalias() += col * P.col(i).transpose();
    }
    return A;
}

double bd_truncation_error_sq(const BidiagonalMatrix& B, const std::vector<Index>& indices) {
    std::vector<bool> kept(static_cast<std::size_t>(B.t()), false);
    for (Index i : indices) {
        if (i < 0 || i >= B.t()) throw std::invalid_argument("bd_truncation_error_sq: index out of range");
        kept[static_cast<std::size_t>(i)] = true;
    }
    double sum = 0.0;
    for (Index i = 0; i < B.t(); ++i)
        if (!kept[static_cast<std::size_t>(i)]) sum += B.pair_norm_sq(i);
    return sum;
}

double bd_truncation_error_sq_prefix(const BidiagonalMatrix& B, Index r) {
    double sum = 0.0;
    for (Index i = r; i < B.t(); ++i) sum += B.pair_norm_sq(i);
    return sum;
}

double svd_truncation_error_sq(const Vector& sigma, Index r) {
    if (r < 0 || r > sigma.size()) throw std::invalid_argument("svd_truncation_error_sq: r out of range");
    return sigma.tail(sigma.size() - r).squaredNorm();
}

DiffBounds diff_bounds(const Vector& sigma, const BidiagonalMatrix& B, Index r) {
    const Index t = B.t();
    if (r < 1 || r > t) throw std::invalid_argument("diff_bounds: r out of range");
    DiffBounds out;
    double lower = 0.0;
    for (Index i = 0; i < r; ++i) lower += sigma(i) * sigma(i) - B.pair_norm_sq(i);
    out.lower = std::max(0.0, lower);
    for (Index i = 0; i < r; ++i) out.upper_head += sigma(i) * sigma(i) + B.pair_norm_sq(i);
    for (Index i = r; i < t; ++i) out.upper_tail += sigma(i) * sigma(i) + B.pair_norm_sq(i);
    out.upper = std::min(out.upper_head, out.upper_tail);
    return out;
}

double exact_diff_sq(const BidiagonalMatrix& B, Index r) {
    const Index t = B.t();
    if (r < 1 || r > t) throw std::invalid_argument("exact_diff_sq: r out of range");
    const SvdTriple svd = jacobi_svd(B.dense());
    double head = 0.0;
    for (Index i = 0; i < r; ++i) head += svd.sigma(i) * svd.sigma(i) - B.pair_norm_sq(i);
    double cross = 0.0;
    for (Index j = r; j < t; ++j) {
        double rowsum = 0.0;
        for (Index i = 0; i < r; ++i) rowsum += svd.V(i, j) * svd.V(i, j);
        cross += svd.sigma(j) * svd.sigma(j) * rowsum;
    }
    return head + 2.0 * cross;
}

}  // namespace bdup
