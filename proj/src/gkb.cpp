#include "bdup/gkb.hpp"

#include <cmath>

namespace bdup {
namespace {

constexpr double kBreakdownTol = 1e-14;

void orthogonalize(Vector& v, const Matrix& basis, Index ncols, int passes) {
    for (int p = 0; p < passes; ++p)
        for (Index i = 0; i < ncols; ++i) v -= basis.col(i).dot(v) * basis.col(i);
}

}  // namespace

GkbResult gkb(const LinearMap& apply_A, const LinearMap& apply_At, Index m, Index n,
              const Vector& p1, Index steps, Reorth reorth) {
    if (p1.size() != n) throw std::invalid_argument("gkb: p1 has wrong length");
    if (std::abs(p1.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("gkb: p1 must have unit norm");
    if (steps < 1 || steps > std::min(m, n))
        throw std::invalid_argument("gkb: steps out of range");

    Matrix Q(m, steps), P(n, steps);
    Vector alphas(steps), betas(steps);
    const int q_passes = reorth == Reorth::Full ? 2 : 0;
    const int p_passes = reorth == Reorth::Full ? 2 : (reorth == Reorth::ShortSpace ? 1 : 0);

    P.col(0) = p1;
    double band_norm_sq = 0.0;
    bool broke = false;
    Index k = 0;
    while (k < steps) {
        // alpha_k q_k = A p_k - beta_{k-1} q_{k-1}
        Vector u = apply_A(P.col(k));
        if (k > 0) u -= betas(k - 1) * Q.col(k - 1);
        if (q_passes) orthogonalize(u, Q, k, q_passes);
        const double alpha = u.norm();
        if (alpha <= kBreakdownTol * std::sqrt(std::max(band_norm_sq, alpha * alpha))) {
            broke = true;
            break;
        }
        alphas(k) = alpha;
        Q.col(k) = u / alpha;
        band_norm_sq += alpha * alpha;
        ++k;
        if (k == steps) break;

        // beta_k p_{k+1} = A^T q_k - alpha_k p_k
        Vector v = apply_At(Q.col(k - 1)) - alpha * P.col(k - 1);
        if (p_passes) orthogonalize(v, P, k, p_passes);
        const double beta = v.norm();
        if (beta <= kBreakdownTol * std::sqrt(band_norm_sq)) {
            broke = true;
            break;
        }
        betas(k - 1) = beta;
        P.col(k) = v / beta;
        band_norm_sq += beta * beta;
    }

    GkbResult res;
    res.steps = k;
    res.breakdown = broke;
    if (k == 0) {  // nothing usable: A p1 vanished immediately
        res.Q = Matrix(m, 0);
        res.P = Matrix(n, 0);
        res.B = BidiagonalMatrix(1, 1);
        res.B.alpha(0) = 0.0;
        return res;
    }
    res.Q = Q.leftCols(k);
    res.P = P.leftCols(k);
    res.B = BidiagonalMatrix(k, k);
    res.B.alpha = alphas.head(k);
    if (k > 1) res.B.beta = betas.head(k - 1);
    return res;
}

GkbResult gkb(const Matrix& A, const Vector& p1, Index steps, Reorth reorth) {
    return gkb([&](const Vector& x) { return Vector(A * x); },
               [&](const Vector& x) { return Vector(A.transpose() * x); },
               A.rows(), A.cols(), p1, steps, reorth);
}

}  // namespace bdup
