#pragma once

#include "bdup/bgu.hpp"
#include "bdup/types.hpp"

namespace bdup {

/// A rank-1 stream event: either explicit vectors (b, c) or a sparse
/// triple (i, j, theta) standing for b = theta * e_i, c = e_j.
struct UpdateEvent {
    Vector b, c;

    static UpdateEvent dense(Vector b, Vector c) { return {std::move(b), std::move(c)}; }
    static UpdateEvent sparse(Index i, Index j, double theta, Index m, Index n) {
        if (i < 0 || i >= m || j < 0 || j >= n)
            throw std::invalid_argument("UpdateEvent: index out of range");
        if (!std::isfinite(theta)) throw std::invalid_argument("UpdateEvent: theta not finite");
        UpdateEvent ev;
        ev.b = Vector::Zero(m);
        ev.b(i) = theta;
        ev.c = Vector::Zero(n);
        ev.c(j) = 1.0;
        return ev;
    }
};

struct ReorthPolicy {
    enum class Kind { Never, EveryK, Adaptive };
    Kind kind = Kind::Never;
    Index every = 64;          // EveryK cadence
    double threshold = 1e-8;   // Adaptive trigger

    static ReorthPolicy never() { return {}; }
    static ReorthPolicy every_k(Index k) { return {Kind::EveryK, k, 1e-8}; }
    static ReorthPolicy adaptive(double thr = 1e-8) { return {Kind::Adaptive, 64, thr}; }
};

struct Projection {
    Vector bhat, bperp;
    double delta = 0.0;
    Vector chat, cperp;
    double gamma = 0.0;
};

/// Rank-r streaming factorization Q B P^T maintained under rank-1 events
/// by running the Givens update on an (r+1) x (r+1) middle matrix and
/// deflating back to order r.
class TrackedFactorization {
public:
    TrackedFactorization(Index m, Index n, Index r,
                         ReorthPolicy policy = ReorthPolicy::never());

    Index rows() const { return m_; }
    Index cols() const { return n_; }
    Index rank() const { return r_; }
    const Matrix& Q() const { return Q_; }
    const Matrix& P() const { return P_; }
    const BidiagonalMatrix& band() const { return B_; }
    std::uint64_t update_count() const { return update_count_; }
    const BguAudit& last_audit() const { return last_audit_; }
    Index reorth_count() const { return reorth_count_; }

    static TrackedFactorization from_parts(Matrix Q, Matrix P, BidiagonalMatrix B,
                                           std::uint64_t update_count, double drift_Q,
                                           double drift_P, ReorthPolicy policy);

    Projection project(const Vector& b, const Vector& c) const;

    void update(const UpdateEvent& ev);

    /// |frob_A - ||B||_F| for a driver-supplied ||A_h||_F.
    double residual(double frob_A) const;

    /// Orthogonality estimates; a column subset of size min(r, 32) is
    /// sampled each call and the full residual computed every 64th call.
    std::pair<double, double> drift_check();

    void reorthogonalize();

    Matrix dense() const { return Q_ * B_.dense() * P_.transpose(); }

private:
    void deflate(const BidiagonalMatrix& big, const Matrix& Qbig, const Matrix& Pbig);
    Vector complement_column(const Matrix& basis, Index& cursor) const;

    Index m_, n_, r_;
    Matrix Q_, P_;
    BidiagonalMatrix B_;
    ReorthPolicy policy_;
    std::uint64_t update_count_ = 0;
    std::uint64_t drift_calls_ = 0;
    Index reorth_count_ = 0;
    double drift_Q_ = 0.0, drift_P_ = 0.0;
    double drift_reference_ = 0.0;
    BguAudit last_audit_;
};

/// Baseline tracker keeping a thin SVD; the middle matrix is resolved by
/// a full small SVD instead of the Givens update.
class IncrementalSvdBaseline {
public:
    IncrementalSvdBaseline(Index m, Index n, Index r);

    const Matrix& U() const { return U_; }
    const Vector& sigma() const { return sigma_; }
    const Matrix& V() const { return V_; }

    void update(const UpdateEvent& ev);
    double residual(double frob_A) const;
    Matrix dense() const { return U_ * sigma_.asDiagonal() * V_.transpose(); }

private:
    Index m_, n_, r_;
    Matrix U_, V_;
    Vector sigma_;
    std::uint64_t update_count_ = 0;
};

constexpr double kAugmentTol = 1e-12;  // relative delta/gamma below which no column is added

}  // namespace bdup
