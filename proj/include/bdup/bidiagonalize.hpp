#pragma once

#include "bdup/types.hpp"

namespace bdup {

struct BidiagResult {
    Matrix Q;            // m x m orthogonal
    BidiagonalMatrix B;  // upper bidiagonal band
    Matrix P;            // n x n orthogonal
    std::uint64_t mults = 0;  // scalar multiplications spent on reflector work
};

/// Dense Householder bidiagonalization A = Q B P^T with full factors.
/// Handles m < n by factoring A^T and flipping the lower bidiagonal back
/// to upper with m-1 row rotations.
BidiagResult bidiagonalize_dense(const Matrix& A);

}  // namespace bdup
