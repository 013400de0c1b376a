#pragma once

#include "bdup/types.hpp"

namespace bdup {

enum class SketchKind { Gaussian, Rademacher };

struct SketchConfig {
    SketchKind kind = SketchKind::Gaussian;
    Index rank = 1;
    Index oversample = 5;
    std::uint64_t seed = 0;
};

struct RbdResult {
    Matrix Qr;           // m x r_eff
    BidiagonalMatrix Br; // r_eff x n band
    Matrix Pr;           // n x r_eff
    Index effective_rank = 0;
    bool rank_deficient = false;  // sketch lost numerical rank and was trimmed
};

/// Randomized bidiagonal decomposition: sketch the column space with r + p
/// random test vectors, orthonormalize, bidiagonalize the projected rows,
/// and trim back to rank r. The sketch is drawn from a counter-based
/// generator, so identical seeds give bit-identical factors.
RbdResult rbd(const Matrix& A, const SketchConfig& cfg);

/// Small SVD of the band composed with the factors.
SvdTriple rbd_to_rsvd(const RbdResult& r);

/// Deterministic sketch entries (exposed for reproducibility tests).
Matrix sketch_matrix(Index n, Index cols, const SketchConfig& cfg);

}  // namespace bdup
