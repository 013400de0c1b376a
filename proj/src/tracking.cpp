#include "bdup/tracking.hpp"

#include "bdup/bidiagonalize.hpp"
#include "bdup/jacobi_svd.hpp"

#include <cmath>
#include <random>

namespace bdup {

TrackedFactorization::TrackedFactorization(Index m, Index n, Index r, ReorthPolicy policy)
    : m_(m), n_(n), r_(r), policy_(policy) {
    if (r < 1 || r > std::min(m, n))
        throw std::invalid_argument("track_init: rank out of range");
    Q_ = Matrix::Identity(m, r);
    P_ = Matrix::Identity(n, r);
    B_ = BidiagonalMatrix(r, r);
}

TrackedFactorization TrackedFactorization::from_parts(Matrix Q, Matrix P, BidiagonalMatrix B,
                                                      std::uint64_t update_count, double drift_Q,
                                                      double drift_P, ReorthPolicy policy) {
    if (Q.cols() != P.cols() || Q.cols() != B.rows || B.rows != B.cols)
        throw std::invalid_argument("tracker: inconsistent snapshot parts");
    TrackedFactorization t(Q.rows(), P.rows(), Q.cols(), policy);
    t.Q_ = std::move(Q);
    t.P_ = std::move(P);
    t.B_ = std::move(B);
    t.update_count_ = update_count;
    t.drift_Q_ = drift_Q;
    t.drift_P_ = drift_P;
    return t;
}

Projection TrackedFactorization::project(const Vector& b, const Vector& c) const {
    if (b.size() != m_ || c.size() != n_)
        throw std::invalid_argument("project: dimension mismatch");
    Projection pr;
    pr.bhat = Q_.transpose() * b;
    pr.bperp = b - Q_ * pr.bhat;
    // one re-projection pass when the first leaves a visible component
    Vector resid = Q_.transpose() * pr.bperp;
    if (resid.lpNorm<Eigen::Infinity>() > 1e-10 * b.norm()) {
        pr.bhat += resid;
        pr.bperp -= Q_ * resid;
    }
    pr.delta = pr.bperp.norm();
    pr.chat = P_.transpose() * c;
    pr.cperp = c - P_ * pr.chat;
    resid = P_.transpose() * pr.cperp;
    if (resid.lpNorm<Eigen::Infinity>() > 1e-10 * c.norm()) {
        pr.chat += resid;
        pr.cperp -= P_ * resid;
    }
    pr.gamma = pr.cperp.norm();
    return pr;
}

Vector TrackedFactorization::complement_column(const Matrix& basis, Index& cursor) const {
    const Index dim = basis.rows();
    for (Index tries = 0; tries < dim; ++tries) {
        const Index e = cursor % dim;
        ++cursor;
        Vector v = Vector::Unit(dim, e);
        v -= basis * (basis.transpose() * v);
        v -= basis * (basis.transpose() * v);
        const double nn = v.norm();
        if (nn > 0.25) return v / nn;
    }
    throw std::runtime_error("tracking: no orthogonal complement direction found");
}

void TrackedFactorization::update(const UpdateEvent& ev) {
    if (!ev.b.allFinite() || !ev.c.allFinite())
        throw std::invalid_argument("track_update: non-finite event");
    if (ev.b.isZero(0.0) || ev.c.isZero(0.0)) {
        ++update_count_;
        return;
    }
    const Projection pr = project(ev.b, ev.c);
    const bool aug_b = pr.delta > kAugmentTol * ev.b.norm();
    const bool aug_c = pr.gamma > kAugmentTol * ev.c.norm();

    if (!aug_b && !aug_c) {
        // both vectors inside the tracked subspaces: pure middle update
        BguResult res = bgu_update(B_, pr.bhat, pr.chat);
        last_audit_ = res.audit;
        B_ = res.Bnew;
        Q_ = apply_rotations(Q_, res.left, GivensRotation::Side::Right);
        P_ = apply_rotations(P_, res.right, GivensRotation::Side::Right);
    } else {
        BidiagonalMatrix big(r_ + 1, r_ + 1);
        big.alpha.head(r_) = B_.alpha;
        if (r_ > 1) big.beta.head(r_ - 1) = B_.beta;
        Vector bmid = Vector::Zero(r_ + 1), cmid = Vector::Zero(r_ + 1);
        bmid.head(r_) = pr.bhat;
        cmid.head(r_) = pr.chat;
        if (aug_b) bmid(r_) = pr.delta;
        if (aug_c) cmid(r_) = pr.gamma;

        Index cursor = static_cast<Index>(update_count_);
        Matrix Qbig(m_, r_ + 1), Pbig(n_, r_ + 1);
        Qbig.leftCols(r_) = Q_;
        Qbig.col(r_) = aug_b ? Vector(pr.bperp / pr.delta) : complement_column(Q_, cursor);
        Pbig.leftCols(r_) = P_;
        Pbig.col(r_) = aug_c ? Vector(pr.cperp / pr.gamma) : complement_column(P_, cursor);

        BguResult res = bgu_update(big, bmid, cmid);
        last_audit_ = res.audit;
        Qbig = apply_rotations(Qbig, res.left, GivensRotation::Side::Right);
        Pbig = apply_rotations(Pbig, res.right, GivensRotation::Side::Right);
        deflate(res.Bnew, Qbig, Pbig);
    }
    ++update_count_;

    switch (policy_.kind) {
        case ReorthPolicy::Kind::Never:
            break;
        case ReorthPolicy::Kind::EveryK:
            if (policy_.every > 0 && update_count_ % static_cast<std::uint64_t>(policy_.every) == 0)
                reorthogonalize();
            break;
        case ReorthPolicy::Kind::Adaptive: {
            auto [dq, dp] = drift_check();
            const double worst = std::max(dq, dp);
            if (worst > policy_.threshold ||
                (drift_reference_ > 0.0 && worst > 2.0 * drift_reference_)) {
                reorthogonalize();
                drift_reference_ = 0.0;
            } else {
                drift_reference_ = std::max(drift_reference_, worst);
            }
            break;
        }
    }
}

void TrackedFactorization::deflate(const BidiagonalMatrix& big, const Matrix& Qbig,
                                   const Matrix& Pbig) {
    // drop the index with the smallest band column norm, ties toward the
    // larger index; removing row+col d leaves a valid bidiagonal with a
    // zero junction, so no re-chase is needed
    Index drop = 0;
    double best = big.pair_norm_sq(0);
    for (Index i = 1; i <= r_; ++i) {
        const double v = big.pair_norm_sq(i);
        if (v <= best) {
            best = v;
            drop = i;
        }
    }
    BidiagonalMatrix nb(r_, r_);
    Index w = 0;
    for (Index i = 0; i <= r_; ++i) {
        if (i == drop) continue;
        nb.alpha(w) = big.alpha(i);
        if (w > 0) {
            // superdiagonal survives only between originally adjacent indices
            nb.beta(w - 1) = (i - 1 == drop) ? 0.0 : big.beta(i - 1);
        }
        ++w;
    }
    Q_.resize(m_, r_);
    P_.resize(n_, r_);
    w = 0;
    for (Index i = 0; i <= r_; ++i) {
        if (i == drop) continue;
        Q_.col(w) = Qbig.col(i);
        P_.col(w) = Pbig.col(i);
        ++w;
    }
    B_ = nb;
}

double TrackedFactorization::residual(double frob_A) const {
    return std::abs(frob_A - std::sqrt(B_.frobenius_sq()));
}

std::pair<double, double> TrackedFactorization::drift_check() {
    ++drift_calls_;
    if (drift_calls_ % 64 == 0 || r_ <= 32) {
        drift_Q_ = orthogonality_drift(Q_);
        drift_P_ = orthogonality_drift(P_);
        return {drift_Q_, drift_P_};
    }
    const Index k = std::min<Index>(r_, 32);
    std::mt19937_64 gen(0x5eedULL + drift_calls_);
    std::uniform_int_distribution<Index> pick(0, r_ - 1);
    Matrix Sq(m_, k), Sp(n_, k);
    for (Index j = 0; j < k; ++j) {
        const Index c = pick(gen);
        Sq.col(j) = Q_.col(c);
        Sp.col(j) = P_.col(pick(gen));
        (void)c;
    }
    // subset Gram residual, scaled up to the full column count
    const double scale = static_cast<double>(r_) / static_cast<double>(k);
    drift_Q_ = orthogonality_drift(Sq) * scale;
    drift_P_ = orthogonality_drift(Sp) * scale;
    return {drift_Q_, drift_P_};
}

void TrackedFactorization::reorthogonalize() {
    Eigen::HouseholderQR<Matrix> qrq(Q_);
    Matrix Qn = qrq.householderQ() * Matrix::Identity(m_, r_);
    Matrix Rq = qrq.matrixQR().topRows(r_).triangularView<Eigen::Upper>();
    Eigen::HouseholderQR<Matrix> qrp(P_);
    Matrix Pn = qrp.householderQ() * Matrix::Identity(n_, r_);
    Matrix Rp = qrp.matrixQR().topRows(r_).triangularView<Eigen::Upper>();

    // fold the small triangular corrections back into the band
    Matrix M = Rq * B_.dense() * Rp.transpose();
    BidiagResult f = bidiagonalize_dense(M);
    Q_ = Qn * f.Q;
    P_ = Pn * f.P;
    B_ = f.B;
    drift_Q_ = orthogonality_drift(Q_);
    drift_P_ = orthogonality_drift(P_);
    ++reorth_count_;
}

IncrementalSvdBaseline::IncrementalSvdBaseline(Index m, Index n, Index r)
    : m_(m), n_(n), r_(r) {
    if (r < 1 || r > std::min(m, n))
        throw std::invalid_argument("incremental svd: rank out of range");
    U_ = Matrix::Identity(m, r);
    V_ = Matrix::Identity(n, r);
    sigma_ = Vector::Zero(r);
}

void IncrementalSvdBaseline::update(const UpdateEvent& ev) {
    if (ev.b.isZero(0.0) || ev.c.isZero(0.0)) {
        ++update_count_;
        return;
    }
    Vector bhat = U_.transpose() * ev.b;
    Vector bperp = ev.b - U_ * bhat;
    Vector corr = U_.transpose() * bperp;
    bhat += corr;
    bperp -= U_ * corr;
    const double delta = bperp.norm();
    Vector chat = V_.transpose() * ev.c;
    Vector cperp = ev.c - V_ * chat;
    corr = V_.transpose() * cperp;
    chat += corr;
    cperp -= V_ * corr;
    const double gamma = cperp.norm();

    const bool aug_b = delta > kAugmentTol * ev.b.norm();
    const bool aug_c = gamma > kAugmentTol * ev.c.norm();
    const Index s = r_ + ((aug_b || aug_c) ? 1 : 0);

    Matrix M = Matrix::Zero(s, s);
    M.topLeftCorner(r_, r_) = Matrix(sigma_.asDiagonal());
    Vector bm = Vector::Zero(s), cm = Vector::Zero(s);
    bm.head(r_) = bhat;
    cm.head(r_) = chat;
    if (aug_b && s > r_) bm(r_) = delta;
    if (aug_c && s > r_) cm(r_) = gamma;
    M += bm * cm.transpose();

    SvdTriple svd = jacobi_svd(M, 1e-13);

    auto complement = [&](const Matrix& basis) {
        const Index dim = basis.rows();
        for (Index e = 0; e < dim; ++e) {
            Vector v = Vector::Unit(dim, (e + static_cast<Index>(update_count_)) % dim);
            v -= basis * (basis.transpose() * v);
            v -= basis * (basis.transpose() * v);
            const double nn = v.norm();
            if (nn > 0.25) return Vector(v / nn);
        }
        throw std::runtime_error("incremental svd: no complement direction");
    };

    Matrix Ub(m_, s), Vb(n_, s);
    Ub.leftCols(r_) = U_;
    Vb.leftCols(r_) = V_;
    if (s > r_) {
        Ub.col(r_) = aug_b ? Vector(bperp / delta) : complement(U_);
        Vb.col(r_) = aug_c ? Vector(cperp / gamma) : complement(V_);
    }
    // keep the r dominant directions (sigma comes back sorted)
    U_ = Ub * svd.U.leftCols(r_);
    V_ = Vb * svd.V.leftCols(r_);
    sigma_ = svd.sigma.head(r_);
    ++update_count_;
}

double IncrementalSvdBaseline::residual(double frob_A) const {
    return std::abs(frob_A - sigma_.norm());
}

}  // namespace bdup
