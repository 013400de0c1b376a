#pragma once

#include "bdup/types.hpp"

namespace bdup {

/// One plane rotation (or encoded permutation / single-index reflection)
/// acting on rows (side == Left) or columns (side == Right) i and j.
///
/// Semantics on a pair of rows/columns (u, v) = (index i, index j):
///   u' = c*u - s*v,  v' = s*u + c*v
/// Special encodings:
///   (c, s) = (0, +-1)  adjacent transposition (one side negated),
///   (c, s) = (-1, 0)   sign flip of index i only; j is recorded but inert.
struct GivensRotation {
    enum class Side : std::uint8_t { Left, Right };
    Side side = Side::Left;
    Index i = 0;
    Index j = 0;
    double c = 1.0;
    double s = 0.0;
};

/// (c, s) with c*gi - s*gj = 0 and s*gi + c*gj = +-sqrt(gi^2 + gj^2).
/// (0, 0) maps to the identity (1, 0).
std::pair<double, double> givens(double gi, double gj);

struct BguAudit {
    std::uint64_t rotations = 0;      // proper rotations + permutations
    std::uint64_t permutations = 0;   // (0, +-1) shortcuts among the above
    std::uint64_t reflections = 0;    // sign normalizations, not rotations
    std::uint64_t spike_rotations = 0;
    std::uint64_t mult_counter = 0;   // multiplications applied to band/vector data
    std::uint64_t max_mults_per_rotation = 0;
    std::uint64_t setup_mults = 0;    // per-rotation O(1) coefficient work
    std::uint64_t fold_mults = 0;     // folding the residual rank-1 into the band
};

struct BguResult {
    BidiagonalMatrix Bnew;
    std::vector<GivensRotation> left;
    std::vector<GivensRotation> right;
    BguAudit audit;
};

/// Rank-1 update of an upper bidiagonal: factors B + bhat chat^T as
/// G_L (B + bhat chat^T) G_R^T = Bnew with Bnew upper bidiagonal and
/// G_L, G_R the products of the logged left/right records in order.
/// Requires m >= n. Internally uses scaled (square-root-free) plane
/// rotations so that each rotation touches at most a 2x5 window of the
/// band at <= 10 data multiplications.
BguResult bgu_update(const BidiagonalMatrix& B, const Vector& bhat, const Vector& chat);

/// Applies the records in sequence to a dense matrix; side selects row or
/// column action regardless of the side stored in each record, which lets
/// a left log be folded into the columns of an orthogonal factor.
/// transpose flips s -> -s (inverse when replayed in reverse order).
Matrix apply_rotations(const Matrix& M, const std::vector<GivensRotation>& rots,
                       GivensRotation::Side side, bool transpose = false);

}  // namespace bdup
