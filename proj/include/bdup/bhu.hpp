#pragma once

#include "bdup/types.hpp"

namespace bdup {

/// Factored form of a partially rebidiagonalized rank-1 update:
///
///   A_k = B - U M^{-1} V^T,
///   U = [bhat  Y  B W],  V = [chat  B^T Y  W],
///   M = [ -1        0        chat^T W ]
///       [ Y^T bhat  T^T / 2  Y^T B W  ]
///       [ 0         0        R / 2    ]
///
/// where Y, W hold the unit left/right reflector vectors accumulated so
/// far and T, R are the unit upper triangular compact-WY middle factors
/// (off-diagonals 2 y_i^T y_j and 2 w_{i+1}^T w_{j+1}). B is never
/// modified. Auxiliary storage in the packed layout is m*kl + n*kr + kl
/// + kr values, i.e. (m+n+2)k after k full steps.
class HouseholderCompactState {
public:
    HouseholderCompactState(BidiagonalMatrix B, Vector bhat, Vector chat,
                            bool cache_band_product = true);

    Index rows() const { return B_.rows; }
    Index cols() const { return B_.cols; }
    Index k_left() const { return kl_; }
    Index k_right() const { return kr_; }
    bool complete() const { return done_; }
    std::uint64_t mults() const { return mults_; }

    const BidiagonalMatrix& band() const { return B_; }
    const Vector& bhat() const { return bhat_; }
    const Vector& chat() const { return chat_; }
    Matrix Y() const { return Y_.leftCols(kl_); }
    Matrix W() const { return W_.leftCols(kr_); }
    Matrix T() const { return T_.topLeftCorner(kl_, kl_); }
    Matrix R() const { return R_.topLeftCorner(kr_, kr_); }
    Vector cached_Yt_bhat() const { return yTb_.head(kl_); }
    Vector cached_chatT_W() const { return cTW_.head(kr_); }

    /// Number of stored values in the packed representation (excluding B,
    /// bhat, chat and the output band).
    Index auxiliary_storage() const { return rows() * kl_ + cols() * kr_ + kl_ + kr_; }

    /// M^{-1} rhs via two triangular solves and one block product; M is
    /// never formed densely.
    Vector middle_solve(const Vector& rhs) const;
    Vector middle_solve_transpose(const Vector& rhs) const;

    /// Trailing part (rows k..m-1, 0-based) of column k of the current
    /// representation; requires k_left == k.
    Vector column_tail(Index k) const;
    /// Trailing part (cols k+1..n-1) of row k; requires k_left == k + 1
    /// and k_right == k.
    Vector row_tail(Index k) const;

    /// Matrix-free products with the current representation.
    Vector apply(const Vector& x) const;
    Vector apply_transpose(const Vector& x) const;

    Matrix densify() const;

    /// One left reflector (appending alpha_k) and, unless this is the
    /// last step, one right reflector (appending beta_k).
    void step();
    /// Runs up to max_steps steps (all when negative) and, at completion,
    /// extracts the trailing band entries; for m > n one extra left
    /// reflector annihilates the remnant of the last column.
    void run(Index max_steps = -1);

    BidiagonalMatrix new_band() const;

    // packed column layouts used by the on-disk snapshot
    Vector packed_left_column(Index j) const;   // T(0:j-1, j) then y_j(j:m-1)
    Vector packed_right_column(Index j) const;  // R(0:j-1, j), spare 0, w(j+1:n-1)
    void restore_packed(Index kl, Index kr, const Matrix& packedY, const Matrix& packedW,
                        const Vector& yTb, const Vector& cTW);

private:
    void append_left(const Vector& tail, double alpha, Index k);
    void append_right(const Vector& tail, double beta, Index k);
    void finalize();

    BidiagonalMatrix B_;
    Vector bhat_, chat_;
    Matrix Y_, W_, T_, R_, YBW_;
    Vector yTb_, cTW_;
    Vector new_alpha_, new_beta_;
    Index kl_ = 0, kr_ = 0;
    bool cache_ = true;
    bool done_ = false;
    mutable std::uint64_t mults_ = 0;
};

struct BhuResult {
    BidiagonalMatrix Bnew;
    Matrix Y, W, T, R;
    std::uint64_t mults = 0;
};

HouseholderCompactState bhu_init(const BidiagonalMatrix& B, const Vector& bhat,
                                 const Vector& chat, bool cache_band_product = true);

/// Full fill-in-free rebidiagonalization of B + bhat chat^T. Requires
/// m >= n. The returned Y, T (and W, R) define the compact products
/// Q1 = I - 2 Y T^{-1} Y^T and P1 = I - 2 W R^{-1} W^T with
/// Q1^T (B + bhat chat^T) P1 = Bnew.
BhuResult bhu_run(const BidiagonalMatrix& B, const Vector& bhat, const Vector& chat,
                  bool cache_band_product = true, Index max_steps = -1);

}  // namespace bdup
