#include "bdup/bhu.hpp"

#include "bdup/householder.hpp"

#include <cmath>

namespace bdup {

HouseholderCompactState::HouseholderCompactState(BidiagonalMatrix B, Vector bhat, Vector chat,
                                                 bool cache_band_product)
    : B_(std::move(B)), bhat_(std::move(bhat)), chat_(std::move(chat)), cache_(cache_band_product) {
    const Index m = B_.rows, n = B_.cols;
    if (bhat_.size() != m || chat_.size() != n)
        throw std::invalid_argument("bhu: update vector dimensions do not match the band");
    if (m < n) throw std::invalid_argument("bhu: requires m >= n");

    const Index kw = std::max<Index>(n - 2, 0);
    Y_ = Matrix::Zero(m, n);
    W_ = Matrix::Zero(n, kw);
    T_ = Matrix::Zero(n, n);
    R_ = Matrix::Zero(kw, kw);
    YBW_ = Matrix::Zero(n, kw);
    yTb_ = Vector::Zero(n);
    cTW_ = Vector::Zero(kw);
    new_alpha_ = Vector::Zero(n);
    new_beta_ = Vector::Zero(std::max<Index>(n - 1, 0));
    if (n == 1 && m == 1) {
        // degenerate 1x1: nothing to reflect
    }
}

HouseholderCompactState bhu_init(const BidiagonalMatrix& B, const Vector& bhat,
                                 const Vector& chat, bool cache_band_product) {
    return HouseholderCompactState(B, bhat, chat, cache_band_product);
}

Vector HouseholderCompactState::middle_solve(const Vector& rhs) const {
    const Index q = 1 + kl_ + kr_;
    if (rhs.size() != q) throw std::invalid_argument("middle_solve: rhs has wrong length");

    Vector x(q);
    // back substitution with R/2 (unit upper triangular scaled by 1/2)
    for (Index i = kr_ - 1; i >= 0; --i) {
        double acc = rhs(1 + kl_ + i);
        for (Index j = i + 1; j < kr_; ++j) acc -= 0.5 * R_(i, j) * x(1 + kl_ + j);
        if (R_(i, i) == 0.0) throw std::runtime_error("middle_solve: singular triangular block");
        x(1 + kl_ + i) = 2.0 * acc;
        mults_ += static_cast<std::uint64_t>(kr_ - i);
    }
    // y1 = rhs_head - M12 * x2
    Vector y1 = rhs.head(1 + kl_);
    if (kr_ > 0) {
        y1(0) -= cTW_.head(kr_).dot(x.segment(1 + kl_, kr_));
        mults_ += static_cast<std::uint64_t>(kr_);
        if (kl_ > 0) {
            if (cache_) {
                y1.tail(kl_).noalias() -=
                    YBW_.topLeftCorner(kl_, kr_) * x.segment(1 + kl_, kr_);
                mults_ += static_cast<std::uint64_t>(kl_ * kr_);
            } else {
                // matrix-free: Y^T (B (W x2))
                Vector wx = Vector::Zero(B_.cols);
                for (Index j = 0; j < kr_; ++j) {
                    const Index len = B_.cols - (j + 1);
                    wx.tail(len) += x(1 + kl_ + j) * W_.col(j).tail(len);
                    mults_ += static_cast<std::uint64_t>(len);
                }
                Vector bwx = Vector::Zero(B_.rows);
                for (Index i = 0; i < B_.t(); ++i) {
                    bwx(i) = B_.alpha(i) * wx(i);
                    if (i < B_.t() - 1) bwx(i) += B_.beta(i) * wx(i + 1);
                }
                mults_ += static_cast<std::uint64_t>(2 * B_.t());
                for (Index i = 0; i < kl_; ++i) {
                    const Index len = B_.rows - i;
                    y1(1 + i) -= Y_.col(i).tail(len).dot(bwx.tail(len));
                    mults_ += static_cast<std::uint64_t>(len);
                }
            }
        }
    }
    // forward substitution with [[-1, 0], [Y^T bhat, T^T/2]]
    x(0) = -y1(0);
    for (Index i = 0; i < kl_; ++i) {
        double acc = y1(1 + i) - yTb_(i) * x(0);
        for (Index j = 0; j < i; ++j) acc -= 0.5 * T_(j, i) * x(1 + j);
        if (T_(i, i) == 0.0) throw std::runtime_error("middle_solve: singular triangular block");
        x(1 + i) = 2.0 * acc;
        mults_ += static_cast<std::uint64_t>(i + 2);
    }
    return x;
}

Vector HouseholderCompactState::middle_solve_transpose(const Vector& rhs) const {
    const Index q = 1 + kl_ + kr_;
    if (rhs.size() != q) throw std::invalid_argument("middle_solve_transpose: rhs has wrong length");

    Vector z(q);
    // back substitution with (T/2): rows kl..1 of the transposed head block
    for (Index i = kl_ - 1; i >= 0; --i) {
        double acc = rhs(1 + i);
        for (Index j = i + 1; j < kl_; ++j) acc -= 0.5 * T_(i, j) * z(1 + j);
        z(1 + i) = 2.0 * acc;
        mults_ += static_cast<std::uint64_t>(kl_ - i);
    }
    double acc0 = -rhs(0);
    for (Index j = 0; j < kl_; ++j) acc0 += yTb_(j) * z(1 + j);
    mults_ += static_cast<std::uint64_t>(kl_);
    z(0) = acc0;
    // forward substitution with (R^T/2) on q2 = rhs_tail - M12^T z1
    for (Index i = 0; i < kr_; ++i) {
        double acc = rhs(1 + kl_ + i) - cTW_(i) * z(0);
        if (cache_) {
            for (Index j = 0; j < kl_; ++j) acc -= YBW_(j, i) * z(1 + j);
            mults_ += static_cast<std::uint64_t>(kl_ + 1);
        } else {
            // column i of Y^T B W is Y^T (B w_{i+1})
            Vector w = Vector::Zero(B_.cols);
            const Index len = B_.cols - (i + 1);
            w.tail(len) = W_.col(i).tail(len);
            Vector bw = Vector::Zero(B_.rows);
            for (Index r = 0; r < B_.t(); ++r) {
                bw(r) = B_.alpha(r) * w(r);
                if (r < B_.t() - 1) bw(r) += B_.beta(r) * w(r + 1);
            }
            mults_ += static_cast<std::uint64_t>(2 * B_.t());
            for (Index j = 0; j < kl_; ++j) {
                const Index lenj = B_.rows - j;
                acc -= (Y_.col(j).tail(lenj).dot(bw.tail(lenj))) * z(1 + j);
                mults_ += static_cast<std::uint64_t>(lenj + 1);
            }
            mults_ += 1;
        }
        for (Index j = 0; j < i; ++j) acc -= 0.5 * R_(j, i) * z(1 + kl_ + j);
        z(1 + kl_ + i) = 2.0 * acc;
        mults_ += static_cast<std::uint64_t>(i + 1);
    }
    return z;
}

Vector HouseholderCompactState::column_tail(Index k) const {
    if (k != kl_) throw std::runtime_error("bhu: column requested out of order");
    const Index m = B_.rows;
    const Index q = 1 + kl_ + kr_;

    Vector w(q);
    w(0) = chat_(k);
    for (Index i = 0; i < kl_; ++i) {
        double v = B_.alpha(k) * Y_(k, i);
        if (k > 0) v += B_.beta(k - 1) * Y_(k - 1, i);
        w(1 + i) = v;
    }
    mults_ += static_cast<std::uint64_t>(kl_ * (k > 0 ? 2 : 1));
    for (Index j = 0; j < kr_; ++j) w(1 + kl_ + j) = W_(k, j);

    Vector u = middle_solve(w);

    Vector col = Vector::Zero(m - k);
    col(0) = B_.alpha(k);
    // subtract U(k:, :) u
    col.noalias() -= bhat_.tail(m - k) * u(0);
    mults_ += static_cast<std::uint64_t>(m - k);
    if (kl_ > 0) {
        col.noalias() -= Y_.bottomLeftCorner(m - k, kl_) * u.segment(1, kl_);
        mults_ += static_cast<std::uint64_t>((m - k) * kl_);
    }
    if (kr_ > 0) {
        Vector wx = Vector::Zero(B_.cols);
        for (Index j = 0; j < kr_; ++j) {
            const Index len = B_.cols - (j + 1);
            wx.tail(len) += u(1 + kl_ + j) * W_.col(j).tail(len);
            mults_ += static_cast<std::uint64_t>(len);
        }
        for (Index i = k; i < B_.t(); ++i) {
            double v = B_.alpha(i) * wx(i);
            if (i < B_.t() - 1) v += B_.beta(i) * wx(i + 1);
            col(i - k) -= v;
        }
        mults_ += static_cast<std::uint64_t>(2 * (B_.t() - k));
    }
    return col;
}

Vector HouseholderCompactState::row_tail(Index k) const {
    if (kl_ != k + 1 || kr_ != k) throw std::runtime_error("bhu: row requested out of order");
    const Index n = B_.cols;
    const Index q = 1 + kl_ + kr_;

    Vector z(q);
    z(0) = bhat_(k);
    for (Index i = 0; i < kl_; ++i) z(1 + i) = Y_(k, i);
    for (Index j = 0; j < kr_; ++j) {
        double v = B_.alpha(k) * W_(k, j);
        if (k < B_.t() - 1) v += B_.beta(k) * W_(k + 1, j);
        z(1 + kl_ + j) = v;
    }
    mults_ += static_cast<std::uint64_t>(2 * kr_);

    Vector v = middle_solve_transpose(z);

    const Index len = n - 1 - k;
    Vector row = Vector::Zero(len);
    if (k < B_.t() - 1) row(0) = B_.beta(k);
    row.noalias() -= chat_.tail(len) * v(0);
    mults_ += static_cast<std::uint64_t>(len);
    if (kl_ > 0) {
        // (B^T Y)(j, :) vY = alpha_j g(j) + beta_{j-1} g(j-1), g = Y vY
        Vector g = Y_.block(k, 0, n - k, kl_) * v.segment(1, kl_);
        mults_ += static_cast<std::uint64_t>((n - k) * kl_);
        for (Index j = k + 1; j < n; ++j) {
            double s = B_.alpha(j) * g(j - k) + B_.beta(j - 1) * g(j - 1 - k);
            row(j - k - 1) -= s;
        }
        mults_ += static_cast<std::uint64_t>(2 * len);
    }
    if (kr_ > 0) {
        row.noalias() -= W_.block(k + 1, 0, len, kr_) * v.segment(1 + kl_, kr_);
        mults_ += static_cast<std::uint64_t>(len * kr_);
    }
    return row;
}

void HouseholderCompactState::append_left(const Vector& tail, double alpha, Index k) {
    const Index m = B_.rows;
    if (!std::isfinite(alpha) || !tail.allFinite())
        throw std::runtime_error("bhu: non-finite value at left step " + std::to_string(k + 1));
    Y_.col(kl_).setZero();
    Y_.col(kl_).tail(m - k) = tail;
    T_(kl_, kl_) = 1.0;
    for (Index i = 0; i < kl_; ++i) {
        T_(i, kl_) = 2.0 * Y_.col(i).tail(m - k).dot(tail);
        mults_ += static_cast<std::uint64_t>(m - k + 1);
    }
    yTb_(kl_) = tail.dot(bhat_.tail(m - k));
    mults_ += static_cast<std::uint64_t>(m - k);
    if (cache_ && W_.cols() > 0) {
        // row kl of Y^T B W: (B^T y)^T w_j over the shared support
        Vector bty = Vector::Zero(B_.cols);
        for (Index j = k; j < B_.cols; ++j) {
            double v = B_.alpha(j) * Y_(j, kl_);
            if (j > 0 && j - 1 >= k) v += B_.beta(j - 1) * Y_(j - 1, kl_);
            bty(j) = v;
        }
        mults_ += static_cast<std::uint64_t>(2 * (B_.cols - k));
        for (Index j = 0; j < kr_; ++j) {
            const Index lo = std::max(k, j + 1);
            YBW_(kl_, j) = bty.tail(B_.cols - lo).dot(W_.col(j).tail(B_.cols - lo));
            mults_ += static_cast<std::uint64_t>(B_.cols - lo);
        }
    }
    new_alpha_(k) = alpha;
    ++kl_;
}

void HouseholderCompactState::append_right(const Vector& tail, double beta, Index k) {
    const Index n = B_.cols;
    if (!std::isfinite(beta) || !tail.allFinite())
        throw std::runtime_error("bhu: non-finite value at right step " + std::to_string(k + 1));
    const Index len = n - 1 - k;
    W_.col(kr_).setZero();
    W_.col(kr_).tail(len) = tail;
    R_(kr_, kr_) = 1.0;
    for (Index i = 0; i < kr_; ++i) {
        R_(i, kr_) = 2.0 * W_.col(i).tail(len).dot(tail);
        mults_ += static_cast<std::uint64_t>(len + 1);
    }
    cTW_(kr_) = tail.dot(chat_.tail(len));
    mults_ += static_cast<std::uint64_t>(len);
    if (cache_) {
        // column kr of Y^T B W: Y^T (B w)
        Vector bw = Vector::Zero(B_.rows);
        for (Index i = k; i < B_.t(); ++i) {
            double v = B_.alpha(i) * W_(i, kr_);
            if (i < B_.t() - 1) v += B_.beta(i) * W_(i + 1, kr_);
            bw(i) = v;
        }
        mults_ += static_cast<std::uint64_t>(2 * (B_.t() - k));
        for (Index i = 0; i < kl_; ++i) {
            const Index lo = std::max(i, k);
            YBW_(i, kr_) = Y_.col(i).segment(lo, B_.t() - lo).dot(bw.segment(lo, B_.t() - lo));
            mults_ += static_cast<std::uint64_t>(B_.t() - lo);
        }
    }
    new_beta_(k) = beta;
    ++kr_;
}

void HouseholderCompactState::step() {
    const Index n = B_.cols;
    if (done_ || kl_ > n - 2)
        throw std::runtime_error("bhu: step past the end of the factorization");
    const Index k = kl_;

    Vector col = column_tail(k);
    HouseReflection hl = house(col, 0);
    mults_ += static_cast<std::uint64_t>(2 * col.size());
    append_left(hl.y.essential, hl.alpha, k);

    if (k == n - 2) return;  // last left reflector: no paired right reflector

    Vector row = row_tail(k);
    HouseReflection hr = house(row, 0);
    mults_ += static_cast<std::uint64_t>(2 * row.size());
    append_right(hr.y.essential, hr.alpha, k);
}

void HouseholderCompactState::finalize() {
    const Index m = B_.rows, n = B_.cols;
    // trailing column of the representation, rows n-2..m-1 (or all of a
    // single column when n == 1)
    const Index k = n - 1;
    const Index row0 = std::max<Index>(n - 2, 0);

    const Index q = 1 + kl_ + kr_;
    Vector w(q);
    w(0) = chat_(k);
    for (Index i = 0; i < kl_; ++i) {
        double v = B_.alpha(k) * Y_(k, i);
        if (k > 0) v += B_.beta(k - 1) * Y_(k - 1, i);
        w(1 + i) = v;
    }
    mults_ += static_cast<std::uint64_t>(kl_ * (k > 0 ? 2 : 1));
    for (Index j = 0; j < kr_; ++j) w(1 + kl_ + j) = W_(k, j);
    Vector u = middle_solve(w);

    Vector col = Vector::Zero(m - row0);
    col(k - row0) += B_.alpha(k);
    if (k > 0) col(0) += B_.beta(k - 1);
    col.noalias() -= bhat_.tail(m - row0) * u(0);
    mults_ += static_cast<std::uint64_t>(m - row0);
    if (kl_ > 0) {
        col.noalias() -= Y_.bottomLeftCorner(m - row0, kl_) * u.segment(1, kl_);
        mults_ += static_cast<std::uint64_t>((m - row0) * kl_);
    }
    if (kr_ > 0) {
        Vector wx = Vector::Zero(n);
        for (Index j = 0; j < kr_; ++j) {
            const Index len = n - (j + 1);
            wx.tail(len) += u(1 + kl_ + j) * W_.col(j).tail(len);
            mults_ += static_cast<std::uint64_t>(len);
        }
        for (Index i = row0; i < B_.t(); ++i) {
            double v = B_.alpha(i) * wx(i);
            if (i < B_.t() - 1) v += B_.beta(i) * wx(i + 1);
            col(i - row0) -= v;
        }
        mults_ += static_cast<std::uint64_t>(2 * (B_.t() - row0));
    }

    if (n >= 2) new_beta_(n - 2) = col(0);
    Vector tail = col.tail(m - k);
    if (m == n) {
        new_alpha_(k) = tail(0);
    } else {
        HouseReflection h = house(tail, 0);
        mults_ += static_cast<std::uint64_t>(2 * tail.size());
        append_left(h.y.essential, h.alpha, k);
    }
    done_ = true;
}

void HouseholderCompactState::run(Index max_steps) {
    const Index n = B_.cols;
    Index budget = max_steps < 0 ? n : max_steps;
    while (kl_ <= n - 2 && budget > 0) {
        step();
        --budget;
    }
    if (kl_ >= n - 1 && !done_) finalize();
}

BidiagonalMatrix HouseholderCompactState::new_band() const {
    BidiagonalMatrix out(B_.rows, B_.cols);
    out.alpha = new_alpha_.head(out.alpha.size());
    if (out.beta.size() > 0) out.beta = new_beta_.head(out.beta.size());
    return out;
}

Vector HouseholderCompactState::apply(const Vector& x) const {
    const Index m = B_.rows, n = B_.cols;
    if (x.size() != n) throw std::invalid_argument("bhu apply: dimension mismatch");
    Vector bx = Vector::Zero(m);
    for (Index i = 0; i < B_.t(); ++i) {
        bx(i) = B_.alpha(i) * x(i);
        if (i < B_.t() - 1) bx(i) += B_.beta(i) * x(i + 1);
    }
    const Index q = 1 + kl_ + kr_;
    Vector w(q);
    w(0) = chat_.dot(x);
    for (Index i = 0; i < kl_; ++i) {
        const Index len = m - i;
        w(1 + i) = Y_.col(i).tail(len).dot(bx.tail(len));
    }
    for (Index j = 0; j < kr_; ++j) {
        const Index len = n - (j + 1);
        w(1 + kl_ + j) = W_.col(j).tail(len).dot(x.tail(len));
    }
    Vector u = middle_solve(w);
    Vector out = bx;
    out.noalias() -= bhat_ * u(0);
    for (Index i = 0; i < kl_; ++i) {
        const Index len = m - i;
        out.tail(len) -= u(1 + i) * Y_.col(i).tail(len);
    }
    if (kr_ > 0) {
        Vector wx = Vector::Zero(n);
        for (Index j = 0; j < kr_; ++j) {
            const Index len = n - (j + 1);
            wx.tail(len) += u(1 + kl_ + j) * W_.col(j).tail(len);
        }
        for (Index i = 0; i < B_.t(); ++i) {
            double v = B_.alpha(i) * wx(i);
            if (i < B_.t() - 1) v += B_.beta(i) * wx(i + 1);
            out(i) -= v;
        }
    }
    return out;
}

Vector HouseholderCompactState::apply_transpose(const Vector& x) const {
    const Index m = B_.rows, n = B_.cols;
    if (x.size() != m) throw std::invalid_argument("bhu apply_transpose: dimension mismatch");
    Vector btx = Vector::Zero(n);
    for (Index j = 0; j < B_.t(); ++j) {
        btx(j) = B_.alpha(j) * x(j);
        if (j > 0) btx(j) += B_.beta(j - 1) * x(j - 1);
    }
    const Index q = 1 + kl_ + kr_;
    Vector z(q);
    z(0) = bhat_.dot(x);
    for (Index i = 0; i < kl_; ++i) {
        const Index len = m - i;
        z(1 + i) = Y_.col(i).tail(len).dot(x.tail(len));
    }
    if (kr_ > 0) {
        for (Index j = 0; j < kr_; ++j) {
            const Index len = n - (j + 1);
            z(1 + kl_ + j) = W_.col(j).tail(len).dot(btx.tail(len));
        }
    }
    Vector v = middle_solve_transpose(z);
    Vector out = btx;
    out.noalias() -= chat_ * v(0);
    if (kl_ > 0) {
        // B^T Y vY: accumulate g = Y vY, then band-transpose it
        Vector g = Vector::Zero(m);
        for (Index i = 0; i < kl_; ++i) {
            const Index len = m - i;
            g.tail(len) += v(1 + i) * Y_.col(i).tail(len);
        }
        for (Index j = 0; j < B_.t(); ++j) {
            double s = B_.alpha(j) * g(j);
            if (j > 0) s += B_.beta(j - 1) * g(j - 1);
            out(j) -= s;
        }
    }
    for (Index j = 0; j < kr_; ++j) {
        const Index len = n - (j + 1);
        out.tail(len) -= v(1 + kl_ + j) * W_.col(j).tail(len);
    }
    return out;
}

Matrix HouseholderCompactState::densify() const {
    const Index n = B_.cols;
    Matrix A(B_.rows, n);
    for (Index j = 0; j < n; ++j) A.col(j) = apply(Vector::Unit(n, j));
    return A;
}

Vector HouseholderCompactState::packed_left_column(Index j) const {
    const Index m = B_.rows;
    Vector col(m);
    for (Index i = 0; i < j; ++i) col(i) = T_(i, j);
    col.tail(m - j) = Y_.col(j).tail(m - j);
    return col;
}

Vector HouseholderCompactState::packed_right_column(Index j) const {
    const Index n = B_.cols;
    Vector col = Vector::Zero(n);
    for (Index i = 0; i < j; ++i) col(i) = R_(i, j);
    col.tail(n - 1 - j) = W_.col(j).tail(n - 1 - j);
    return col;
}

void HouseholderCompactState::restore_packed(Index kl, Index kr, const Matrix& packedY,
                                             const Matrix& packedW, const Vector& yTb,
                                             const Vector& cTW) {
    const Index m = B_.rows, n = B_.cols;
    if (packedY.rows() != m || packedY.cols() != kl || packedW.rows() != n || packedW.cols() != kr)
        throw std::invalid_argument("bhu restore: packed array dimensions do not match header");
    kl_ = kl;
    kr_ = kr;
    for (Index j = 0; j < kl; ++j) {
        Y_.col(j).setZero();
        Y_.col(j).tail(m - j) = packedY.col(j).tail(m - j);
        T_(j, j) = 1.0;
        for (Index i = 0; i < j; ++i) T_(i, j) = packedY(i, j);
    }
    for (Index j = 0; j < kr; ++j) {
        W_.col(j).setZero();
        W_.col(j).tail(n - 1 - j) = packedW.col(j).tail(n - 1 - j);
        R_(j, j) = 1.0;
        for (Index i = 0; i < j; ++i) R_(i, j) = packedW(i, j);
    }
    yTb_.head(kl) = yTb;
    cTW_.head(kr) = cTW;
    if (cache_) {
        // rebuild the k x k band-product cache from scratch
        for (Index j = 0; j < kr; ++j) {
            Vector bw = Vector::Zero(m);
            for (Index i = 0; i < B_.t(); ++i) {
                bw(i) = B_.alpha(i) * W_(i, j);
                if (i < B_.t() - 1) bw(i) += B_.beta(i) * W_(i + 1, j);
            }
            for (Index i = 0; i < kl; ++i) {
                const Index len = m - i;
                YBW_(i, j) = Y_.col(i).tail(len).dot(bw.tail(len));
            }
        }
    }
    // recover the already-produced band entries from the representation;
    // entries (k, k) and (k, k+1) are fixed once reflector k has passed
    for (Index k = 0; k < std::min(kl, n); ++k) new_alpha_(k) = apply(Vector::Unit(n, k))(k);
    for (Index k = 0; k < kr; ++k) new_beta_(k) = apply(Vector::Unit(n, k + 1))(k);
    if (kl_ == n && n >= 2) {
        // only a completed m > n factorization stores n left reflectors
        new_beta_(n - 2) = apply(Vector::Unit(n, n - 1))(n - 2);
        done_ = true;
    }
}

BhuResult bhu_run(const BidiagonalMatrix& B, const Vector& bhat, const Vector& chat,
                  bool cache_band_product, Index max_steps) {
    HouseholderCompactState st(B, bhat, chat, cache_band_product);
    st.run(max_steps);
    BhuResult out;
    out.Bnew = st.new_band();
    out.Y = st.Y();
    out.W = st.W();
    out.T = st.T();
    out.R = st.R();
    out.mults = st.mults();
    return out;
}

}  // namespace bdup
