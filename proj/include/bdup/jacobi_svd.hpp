#pragma once

#include "bdup/types.hpp"

namespace bdup {

/// One-sided Jacobi SVD, used as the self-contained verification oracle for
/// small and medium matrices (min(m, n) <= 512). Sweeps column pairs until
/// every off-diagonal Gram entry satisfies |g_p^T g_q| <= tol * |g_p| |g_q|.
/// Throws ConvergenceError (carrying the best iterate) after 60 sweeps.
SvdTriple jacobi_svd(const Matrix& A, double tol = 1e-12);

}  // namespace bdup
