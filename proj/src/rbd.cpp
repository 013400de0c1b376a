#include "bdup/rbd.hpp"

#include "bdup/bidiagonalize.hpp"
#include "bdup/jacobi_svd.hpp"

#include <cmath>

namespace bdup {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform01(std::uint64_t seed, std::uint64_t counter) {
    // 53-bit mantissa in (0, 1]
    const std::uint64_t bits = splitmix64(seed ^ splitmix64(counter));
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

Matrix sketch_matrix(Index n, Index cols, const SketchConfig& cfg) {
    Matrix S(n, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < n; ++i) {
            const std::uint64_t ctr = 2 * static_cast<std::uint64_t>(i * cols + j);
            if (cfg.kind == SketchKind::Rademacher) {
                S(i, j) = uniform01(cfg.seed, ctr) < 0.5 ? -1.0 : 1.0;
            } else {
                const double u1 = uniform01(cfg.seed, ctr);
                const double u2 = uniform01(cfg.seed, ctr + 1);
                S(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            }
        }
    }
    return S;
}

RbdResult rbd(const Matrix& A, const SketchConfig& cfg) {
    const Index m = A.rows(), n = A.cols();
    if (cfg.rank < 1 || cfg.oversample < 0 || cfg.rank + cfg.oversample > n)
        throw std::invalid_argument("rbd: need 1 <= r and r + p <= n");

    const Index l = cfg.rank + cfg.oversample;
    Matrix Y = A * sketch_matrix(n, l, cfg);

    // rank-revealing thin QR of the sketch
    Eigen::ColPivHouseholderQR<Matrix> qr(Y);
    qr.setThreshold(1e-12);
    const Index numrank = std::min<Index>(qr.rank(), l);
    Matrix Qy = Matrix(qr.householderQ()) .leftCols(std::max<Index>(numrank, 1));

    RbdResult out;
    out.rank_deficient = numrank < std::min(l, std::min(m, n));
    const Index r_eff = std::min(cfg.rank, std::max<Index>(numrank, 1));
    out.effective_rank = r_eff;

    Matrix Z = Qy.transpose() * A;  // rowspace sketch, numrank x n
    BidiagResult zf = bidiagonalize_dense(Z);

    Matrix Qfull = Qy * zf.Q;  // m x numrank
    out.Qr = Qfull.leftCols(r_eff);
    out.Pr = zf.P.leftCols(r_eff);
    out.Br = BidiagonalMatrix(r_eff, n);
    out.Br.alpha = zf.B.alpha.head(r_eff);
    if (r_eff > 1) out.Br.beta = zf.B.beta.head(r_eff - 1);
    return out;
}

SvdTriple rbd_to_rsvd(const RbdResult& r) {
    const Index k = r.effective_rank;
    Matrix Bsmall = Matrix::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
        Bsmall(i, i) = r.Br.alpha(i);
        if (i > 0) Bsmall(i - 1, i) = r.Br.beta(i - 1);
    }
    SvdTriple small = jacobi_svd(Bsmall, 1e-13);
    SvdTriple out;
    out.U = r.Qr * small.U;
    out.sigma = small.sigma;
    out.V = r.Pr * small.V;
    return out;
}

}  // namespace bdup
