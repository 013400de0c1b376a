#pragma once

#include "bdup/types.hpp"

#include <functional>

namespace bdup {

enum class Reorth { None, Full, ShortSpace };

using LinearMap = std::function<Vector(const Vector&)>;

struct GkbResult {
    Matrix Q;            // m x k
    BidiagonalMatrix B;  // k x k
    Matrix P;            // n x k
    bool breakdown = false;
    Index steps = 0;
};

/// Golub-Kahan bidiagonalization driven by matrix-vector products.
/// Runs the two coupled recurrences from the unit start vector p1; a
/// diagonal element below 1e-14 times the running norm estimate stops the
/// iteration early with the columns computed so far and breakdown = true.
/// Reorth::Full reorthogonalizes both bases (two Gram-Schmidt passes),
/// Reorth::ShortSpace only the P columns (one modified Gram-Schmidt pass).
GkbResult gkb(const LinearMap& apply_A, const LinearMap& apply_At, Index m, Index n,
              const Vector& p1, Index steps, Reorth reorth);

GkbResult gkb(const Matrix& A, const Vector& p1, Index steps, Reorth reorth);

}  // namespace bdup
