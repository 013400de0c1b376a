#include "bdup/jacobi_svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bdup {
namespace {

constexpr int kMaxSweeps = 60;

SvdTriple jacobi_tall(const Matrix& A, double tol) {
    const Index m = A.rows(), n = A.cols();
    Matrix G = A;
    Matrix V = Matrix::Identity(n, n);

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        converged = true;
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                const double app = G.col(p).squaredNorm();
                const double aqq = G.col(q).squaredNorm();
                const double apq = G.col(p).dot(G.col(q));
                if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
                converged = false;

                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, zeta) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                Vector gp = G.col(p);
                G.col(p) = c * gp - s * G.col(q);
                G.col(q) = s * gp + c * G.col(q);
                Vector vp = V.col(p);
                V.col(p) = c * vp - s * V.col(q);
                V.col(q) = s * vp + c * V.col(q);
            }
        }
    }

    SvdTriple out;
    out.sigma = Vector(n);
    for (Index j = 0; j < n; ++j) out.sigma(j) = G.col(j).norm();

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return out.sigma(a) > out.sigma(b); });

    SvdTriple sorted;
    sorted.U = Matrix::Zero(m, n);
    sorted.V = Matrix(n, n);
    sorted.sigma = Vector(n);
    for (Index j = 0; j < n; ++j) {
        sorted.sigma(j) = out.sigma(order[static_cast<std::size_t>(j)]);
        sorted.V.col(j) = V.col(order[static_cast<std::size_t>(j)]);
    }
    const double smax = sorted.sigma.size() ? sorted.sigma(0) : 0.0;
    const double tiny = std::max(smax, 1.0) * 1e-300;
    Index filled = 0;
    for (Index j = 0; j < n; ++j) {
        if (sorted.sigma(j) > tiny) {
            sorted.U.col(j) = G.col(order[static_cast<std::size_t>(j)]) / sorted.sigma(j);
            filled = j + 1;
        }
    }
    // complete columns for (numerically) zero singular values
    for (Index j = filled; j < n; ++j) {
        for (Index e = 0; e < m; ++e) {
            Vector cand = Vector::Unit(m, e);
            for (Index i = 0; i < j; ++i) cand -= sorted.U.col(i).dot(cand) * sorted.U.col(i);
            const double nn = cand.norm();
            if (nn > 0.5) {  // canonical vector mostly outside span
                sorted.U.col(j) = cand / nn;
                break;
            }
        }
    }

    if (!converged) throw ConvergenceError("jacobi_svd: no convergence after 60 sweeps", sorted);
    return sorted;
}

}  // namespace

SvdTriple jacobi_svd(const Matrix& A, double tol) {
    if (std::min(A.rows(), A.cols()) > 512)
        throw std::invalid_argument("jacobi_svd: min(m, n) must be <= 512");
    if (A.rows() >= A.cols()) return jacobi_tall(A, tol);
    SvdTriple t = jacobi_tall(A.transpose(), tol);
    std::swap(t.U, t.V);
    return t;
}

}  // namespace bdup
