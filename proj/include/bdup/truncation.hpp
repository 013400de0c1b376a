#pragma once

#include "bdup/types.hpp"

namespace bdup {

enum class TruncationMode { Prefix, BestPairs };

/// Indices (0-based) of the r band columns kept by a rank-r truncation.
/// BestPairs maximizes alpha_i^2 + beta_{i-1}^2 over the kept set, with
/// ties broken toward the smaller index; Prefix returns {0..r-1}.
std::vector<Index> select_truncation(const BidiagonalMatrix& B, Index r, TruncationMode mode);

/// Sum over kept indices of (alpha_i q_i + beta_{i-1} q_{i-1}) p_i^T.
Matrix reconstruct_truncated(const Matrix& Q, const BidiagonalMatrix& B, const Matrix& P,
                             const std::vector<Index>& indices);

/// Squared Frobenius error of the band truncation: the excluded-pair sum
/// over i not kept of alpha_i^2 + beta_{i-1}^2. For prefix selections this
/// equals || A - A_r ||_F^2 exactly.
double bd_truncation_error_sq(const BidiagonalMatrix& B, const std::vector<Index>& indices);
double bd_truncation_error_sq_prefix(const BidiagonalMatrix& B, Index r);

/// Tail sum of squared singular values (rank-r SVD truncation error).
double svd_truncation_error_sq(const Vector& sigma, Index r);

struct DiffBounds {
    double lower = 0.0;
    double upper = 0.0;
    double upper_head = 0.0;  // range 1..r variant
    double upper_tail = 0.0;  // range r+1..t variant
};

/// Lower/upper bounds on || A_r^SVD - A_r^BD ||_F^2 given the singular
/// values of B and the band itself. upper is the smaller of the two
/// index-range sums, both of which are reported.
DiffBounds diff_bounds(const Vector& sigma, const BidiagonalMatrix& B, Index r);

/// Exact || A_r^SVD - A_r^BD ||_F^2, evaluated from the SVD of the band:
/// sum_{i<=r} sigma_i^2 - (alpha_i^2 + beta_{i-1}^2)
///   + 2 sum_{j>r} sum_{i<=r} sigma_j^2 P1(i,j)^2.
double exact_diff_sq(const BidiagonalMatrix& B, Index r);

}  // namespace bdup
