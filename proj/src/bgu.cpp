#include "bdup/bgu.hpp"

#include <array>
#include <cmath>

namespace bdup {

std::pair<double, double> givens(double gi, double gj) {
    if (!std::isfinite(gi) || !std::isfinite(gj))
        throw std::invalid_argument("givens: non-finite input");
    if (gi == 0.0 && gj == 0.0) return {1.0, 0.0};
    const double r = std::hypot(gi, gj);
    return {gj / r, gi / r};
}

namespace {

constexpr double kExactZero = 1e-300;  // subnormal guard under the == 0 shortcut
constexpr double kRescaleAt = 0x1.0p-80;

// Banded workspace for the Givens update. The matrix being reduced is
// held as  S_r diag(sqrt(drow)) * (X + bvec cvec^T) * diag(sqrt(dcol)) S_c
// with sign diagonals S_r, S_c: square-root-free rotations act on the
// scaled data X at two data multiplications per touched element pair,
// which keeps every rotation inside the 2x5 access window of the band.
// A "type 1" scaled step has determinant -1; flipping the zeroed row's
// (or column's) sign bit afterwards makes the net effect on the signed
// data an exact plane rotation, which is what gets logged.
//
// X is stored as four diagonals (sub p1, main d, supers u1 and u2) plus
// transient below-band slots (row = col + 2) and above-band slots
// (col = row + 3); two of each cover a parked bulge plus the one the
// running cascade is carrying.
//
// Eliminations move vector mass toward index 0 and no right rotation
// ever touches column 0, so the result agrees entrywise (up to signs)
// with the Householder bidiagonalization of the same matrix.
class Workspace {
public:
    Workspace(const BidiagonalMatrix& B, const Vector& bhat, const Vector& chat)
        : m_(B.rows), n_(B.cols), band_rows_(B.rows > B.cols ? B.cols + 1 : B.cols) {
        d_ = B.alpha;
        u1_ = B.beta;
        u2_ = Vector::Zero(std::max<Index>(n_ - 2, 0));
        p1_ = Vector::Zero(n_);
        bvec_ = bhat;
        cvec_ = chat;
        drow_ = Vector::Ones(m_);
        dcol_ = Vector::Ones(n_);
        srow_ = Vector::Ones(m_);
        scol_ = Vector::Ones(n_);
    }

    BguAudit audit;
    std::vector<GivensRotation> left, right;

    // -- scaled-entry access ------------------------------------------------

    bool in_band(Index r, Index c) const {
        if (r < 0 || c < 0 || r >= band_rows_ || c >= n_) return false;
        const Index delta = r - c;
        return (delta == 0 && r < n_) || (delta == -1 && r <= n_ - 2) ||
               (delta == -2 && r <= n_ - 3) || (delta == 1 && c <= n_ - 1);
    }

    struct Bulge {
        bool active = false;
        Index r = 0, c = 0;
        double v = 0.0;
        std::uint64_t seq = 0;  // spawn order, newest chased first
    };

    double get(Index r, Index c) const {
        if (r < 0 || c < 0 || r >= band_rows_ || c >= n_) return 0.0;
        const Index delta = r - c;
        if (delta == 0 && r < n_) return d_(r);
        if (delta == -1 && r <= n_ - 2) return u1_(r);
        if (delta == -2 && r <= n_ - 3) return u2_(r);
        if (delta == 1 && c <= n_ - 1) return p1_(c);
        for (const Bulge& b : bulges_)
            if (b.active && b.r == r && b.c == c) return b.v;
        return 0.0;
    }

    void set(Index r, Index c, double v) {
        const Index delta = r - c;
        if (in_band(r, c)) {
            if (delta == 0) d_(r) = v;
            else if (delta == -1) u1_(r) = v;
            else if (delta == -2) u2_(r) = v;
            else p1_(c) = v;
            return;
        }
        for (Bulge& b : bulges_) {
            if (b.active && b.r == r && b.c == c) {
                b.v = v;
                if (v == 0.0) b.active = false;
                return;
            }
        }
        if (v == 0.0) return;
        // fresh off-band value: must fit a transient slot
        if (delta != 2 && delta != -3)
            throw std::runtime_error("bgu: fill outside the banded pattern");
        for (Bulge& b : bulges_) {
            if (!b.active) {
                b = Bulge{true, r, c, v, ++bulge_seq_};
#ifdef BDUP_BGU_TRACE
                std::fprintf(stderr, "  spawn (%ld,%ld) v=%g seq=%llu\n", long(r), long(c), v,
                             (unsigned long long)bulge_seq_);
#endif
                return;
            }
        }
        throw std::runtime_error("bgu: transient bulge slots exhausted");
    }

    const Bulge* newest_bulge() const {
        const Bulge* best = nullptr;
        for (const Bulge& b : bulges_)
            if (b.active && (!best || b.seq > best->seq)) best = &b;
        return best;
    }

    double actual(Index r, Index c) const {
        return srow_(r) * scol_(c) * std::sqrt(drow_(r) * dcol_(c)) * get(r, c);
    }
    double actual_b(Index i) const { return srow_(i) * std::sqrt(drow_(i)) * bvec_(i); }
    double actual_c(Index j) const { return scol_(j) * std::sqrt(dcol_(j)) * cvec_(j); }

    const Vector& bvec() const { return bvec_; }
    const Vector& cvec() const { return cvec_; }
    void retire_vectors() { vec_active_ = false; }

    // -- rotations ------------------------------------------------------------

    static constexpr Index kPivotVec = -1;

    /// Left rotation on adjacent rows zeroing row `i` against row `j` at
    /// the pivot (a column index, or kPivotVec for the bvec pair).
    void rotate_rows(Index i, Index j, Index pivot) {
        const double xs = pivot == kPivotVec ? bvec_(i) : get(i, pivot);
        const double ys = pivot == kPivotVec ? bvec_(j) : get(j, pivot);
        const double colscale = pivot == kPivotVec ? 1.0 : dcol_(pivot);
        const double xa = std::sqrt(drow_(i) * colscale) * std::abs(xs);
        if (xs == 0.0 || xa <= kExactZero) return;
        const std::uint64_t before = audit.mult_counter;

        const double ya = std::sqrt(drow_(j) * colscale) * std::abs(ys);
        if (ys == 0.0 || ya <= kExactZero) {
            // permutation shortcut: swap the rows outright; flipping the
            // sign bit of row i makes the signed effect [[0,-1],[1,0]]
            const Index clo = std::max<Index>(std::min(i, j) - 2, 0);
            const Index chi = std::min<Index>(std::max(i, j) + 3, n_ - 1);
            for (Index c = clo; c <= chi; ++c) {
                const double a = get(i, c), b = get(j, c);
                if (a == 0.0 && b == 0.0) continue;
                set(i, c, b);
                set(j, c, a);
            }
            std::swap(drow_(i), drow_(j));
            std::swap(srow_(i), srow_(j));
            std::swap(bvec_(i), bvec_(j));
            srow_(i) = -srow_(i);
            if (pivot == kPivotVec) bvec_(i) = 0.0;
            else set(i, pivot, 0.0);
#ifdef BDUP_BGU_TRACE
            std::fprintf(stderr, "  permL(%ld,%ld|p=%ld)\n", long(i), long(j), long(pivot));
#endif
            left.push_back({GivensRotation::Side::Left, i, j, 0.0, 1.0});
            ++audit.rotations;
            ++audit.permutations;
            bump_max(before);
            return;
        }

        const double w1 = drow_(i) * xs * xs;
        const double w2 = drow_(j) * ys * ys;
        audit.setup_mults += 10;

        double fa, fb, c_log, s_log;
        const bool type1 = w1 >= w2;
        if (type1) {
            fb = -ys / xs;                           // row_i' = fb*row_i + row_j
            fa = (drow_(j) * ys) / (drow_(i) * xs);  // row_j' = row_i + fa*row_j
            const double f = 1.0 + w2 / w1;
            const double di = drow_(i), dj = drow_(j);
            drow_(i) = dj / f;
            drow_(j) = di / f;
            // implemented signed map: row i picks up a sign flip
            c_log = std::sqrt(drow_(i) / di) * (-fb);
            s_log = srow_(i) * srow_(j) * std::sqrt(drow_(j) / di);
            srow_(i) = -srow_(i);
        } else {
            fb = -xs / ys;                           // row_i' = row_i + fb*row_j
            fa = (drow_(i) * xs) / (drow_(j) * ys);  // row_j' = fa*row_i + row_j
            const double f = 1.0 + w1 / w2;
            const double di = drow_(i);
            drow_(i) /= f;
            drow_(j) /= f;
            c_log = std::sqrt(drow_(i) / di);
            s_log = srow_(i) * srow_(j) * std::sqrt(drow_(j) / di) * fa;
        }

        const Index clo = std::max<Index>(std::min(i, j) - 2, 0);
        const Index chi = std::min<Index>(std::max(i, j) + 3, n_ - 1);
        for (Index c = clo; c <= chi; ++c) {
            const double a = get(i, c), b = get(j, c);
            if (a == 0.0 && b == 0.0) continue;
            if (pivot != kPivotVec && c == pivot) {
                set(i, c, 0.0);
                set(j, c, type1 ? a + fa * b : fa * a + b);
                audit.mult_counter += 1;
                continue;
            }
            rotate_pair(type1, fa, fb, a, b, [&](double na, double nb) {
                set(i, c, na);
                set(j, c, nb);
            });
        }
        if (vec_active_) {
            const double a = bvec_(i), b = bvec_(j);
            if (pivot == kPivotVec) {
                bvec_(i) = 0.0;
                bvec_(j) = type1 ? a + fa * b : fa * a + b;
                audit.mult_counter += 1;
            } else if (a != 0.0 || b != 0.0) {
                rotate_pair(type1, fa, fb, a, b, [&](double na, double nb) {
                    bvec_(i) = na;
                    bvec_(j) = nb;
                });
            }
        }
#ifdef BDUP_BGU_TRACE
        std::fprintf(stderr, "  rotL(%ld,%ld|p=%ld) c=%g s=%g\n", long(i), long(j), long(pivot), c_log, s_log);
#endif
        left.push_back({GivensRotation::Side::Left, i, j, c_log, s_log});
        ++audit.rotations;
        bump_max(before);
        rescale_row(i);  // amortized housekeeping, counted globally
        rescale_row(j);
    }

    /// Right rotation on adjacent columns zeroing column `i` against
    /// column `j` at the pivot (a row index, or kPivotVec for cvec).
    void rotate_cols(Index i, Index j, Index pivot) {
        const double xs = pivot == kPivotVec ? cvec_(i) : get(pivot, i);
        const double ys = pivot == kPivotVec ? cvec_(j) : get(pivot, j);
        const double rowscale = pivot == kPivotVec ? 1.0 : drow_(pivot);
        const double xa = std::sqrt(dcol_(i) * rowscale) * std::abs(xs);
        if (xs == 0.0 || xa <= kExactZero) return;
        const std::uint64_t before = audit.mult_counter;

        const double ya = std::sqrt(dcol_(j) * rowscale) * std::abs(ys);
        if (ys == 0.0 || ya <= kExactZero) {
            const Index rlo = std::max<Index>(std::min(i, j) - 3, 0);
            const Index rhi = std::min<Index>(std::max(i, j) + 2, band_rows_ - 1);
            for (Index r = rlo; r <= rhi; ++r) {
                const double a = get(r, i), b = get(r, j);
                if (a == 0.0 && b == 0.0) continue;
                set(r, i, b);
                set(r, j, a);
            }
            std::swap(dcol_(i), dcol_(j));
            std::swap(scol_(i), scol_(j));
            std::swap(cvec_(i), cvec_(j));
            scol_(i) = -scol_(i);
            if (pivot == kPivotVec) cvec_(i) = 0.0;
            else set(pivot, i, 0.0);
#ifdef BDUP_BGU_TRACE
            std::fprintf(stderr, "  permR(%ld,%ld|p=%ld)\n", long(i), long(j), long(pivot));
#endif
            right.push_back({GivensRotation::Side::Right, i, j, 0.0, 1.0});
            ++audit.rotations;
            ++audit.permutations;
            bump_max(before);
            return;
        }

        const double w1 = dcol_(i) * xs * xs;
        const double w2 = dcol_(j) * ys * ys;
        audit.setup_mults += 10;

        double fa, fb, c_log, s_log;
        const bool type1 = w1 >= w2;
        if (type1) {
            fb = -ys / xs;
            fa = (dcol_(j) * ys) / (dcol_(i) * xs);
            const double f = 1.0 + w2 / w1;
            const double di = dcol_(i), dj = dcol_(j);
            dcol_(i) = dj / f;
            dcol_(j) = di / f;
            c_log = std::sqrt(dcol_(i) / di) * (-fb);
            s_log = scol_(i) * scol_(j) * std::sqrt(dcol_(j) / di);
            scol_(i) = -scol_(i);
        } else {
            fb = -xs / ys;
            fa = (dcol_(i) * xs) / (dcol_(j) * ys);
            const double f = 1.0 + w1 / w2;
            const double di = dcol_(i);
            dcol_(i) /= f;
            dcol_(j) /= f;
            c_log = std::sqrt(dcol_(i) / di);
            s_log = scol_(i) * scol_(j) * std::sqrt(dcol_(j) / di) * fa;
        }

        const Index rlo = std::max<Index>(std::min(i, j) - 3, 0);
        const Index rhi = std::min<Index>(std::max(i, j) + 2, band_rows_ - 1);
        for (Index r = rlo; r <= rhi; ++r) {
            const double a = get(r, i), b = get(r, j);
            if (a == 0.0 && b == 0.0) continue;
            if (pivot != kPivotVec && r == pivot) {
                set(r, i, 0.0);
                set(r, j, type1 ? a + fa * b : fa * a + b);
                audit.mult_counter += 1;
                continue;
            }
            rotate_pair(type1, fa, fb, a, b, [&](double na, double nb) {
                set(r, i, na);
                set(r, j, nb);
            });
        }
        if (vec_active_) {
            const double a = cvec_(i), b = cvec_(j);
            if (pivot == kPivotVec) {
                cvec_(i) = 0.0;
                cvec_(j) = type1 ? a + fa * b : fa * a + b;
                audit.mult_counter += 1;
            } else if (a != 0.0 || b != 0.0) {
                rotate_pair(type1, fa, fb, a, b, [&](double na, double nb) {
                    cvec_(i) = na;
                    cvec_(j) = nb;
                });
            }
        }
#ifdef BDUP_BGU_TRACE
        std::fprintf(stderr, "  rotR(%ld,%ld|p=%ld) c=%g s=%g\n", long(i), long(j), long(pivot), c_log, s_log);
#endif
        right.push_back({GivensRotation::Side::Right, i, j, c_log, s_log});
        ++audit.rotations;
        bump_max(before);
        rescale_col(i);  // amortized housekeeping, counted globally
        rescale_col(j);
    }

    // -- bulge chasing ----------------------------------------------------

    // a rotation may not remix a zeroed vector entry with a live one,
    // except among the surviving indices 0..1 which the fold absorbs
    bool rows_safe(Index a, Index b) const {
        if (!vec_active_ || std::max(a, b) <= 1) return true;
        if (a >= m_ || b >= m_) return false;
        return (bvec_(a) == 0.0) == (bvec_(b) == 0.0);
    }
    bool cols_safe(Index a, Index b) const {
        if (!vec_active_ || std::max(a, b) <= 1) return true;
        return (cvec_(a) == 0.0) == (cvec_(b) == 0.0);
    }

    /// Resolves all transient bulges, newest first so a running cascade
    /// finishes before a parked bulge is picked up. Toward the top-left
    /// corner a chase must not mix a zeroed vector entry with a live one
    /// (the survivor rows/cols 0..1 are exempt) and no right rotation may
    /// touch column 0; when either rule blocks the preferred direction
    /// the chase runs toward the bottom-right instead, and vice versa.
    void chase_all(bool prefer_down_right) {
        std::uint64_t guard = 0;
        const std::uint64_t limit = 64 * static_cast<std::uint64_t>(n_ + m_) + 64;
        // a cascade keeps its direction; it may flip once from the
        // top-left corner toward the bottom-right, never back
        int dir = 0;
        std::uint64_t chain_start = 0;
        while (const Bulge* b = newest_bulge()) {
            if (++guard > limit) throw std::runtime_error("bgu: runaway bulge chase");
            const Index r = b->r, c = b->c;
            if (b->seq < chain_start) dir = 0;  // parked bulge: fresh cascade
            if (dir == 0) chain_start = b->seq;
#ifdef BDUP_BGU_TRACE
            std::fprintf(stderr, "chase %s (%ld,%ld) v=%g prefer=%d dir=%d\n",
                         c == r + 3 ? "hi" : "lo", long(r), long(c), b->v,
                         int(prefer_down_right), dir);
#endif
            bool up_ok, down_ok;
            if (c == r + 3) {  // above the band
                up_ok = r + 1 < band_rows_ && rows_safe(r, r + 1);
                down_ok = c - 1 >= 1 && cols_safe(c - 1, c);
            } else {  // below the band
                up_ok = c + 1 < n_ && c >= 1 && cols_safe(c, c + 1);
                down_ok = r - 1 >= 0 && rows_safe(r - 1, r);
            }
            if (dir == 0) dir = prefer_down_right ? (down_ok ? 2 : 1) : (up_ok ? 1 : 2);
            if (dir == 1 && !up_ok) dir = 2;
            if (dir == 2 && !down_ok)
                throw std::runtime_error("bgu: no safe chase direction");
            if (c == r + 3) {
                if (dir == 2) rotate_cols(c, c - 1, r);
                else rotate_rows(r, r + 1, c);
            } else {
                if (dir == 2) rotate_rows(r, r - 1, c);
                else rotate_cols(c, c + 1, r);
            }
        }
    }

    // -- driver ------------------------------------------------------------

    /// Adds the remaining rank-1 mass (vector support within {0, 1}) to
    /// the four top-left band positions and retires the vectors.
    void fold_rank1() {
        for (Index j = 2; j < n_; ++j)
            if (cvec_(j) != 0.0) throw std::runtime_error("bgu: cvec not reduced before fold");
        for (Index i = 2; i < m_; ++i)
            if (bvec_(i) != 0.0) throw std::runtime_error("bgu: bvec not collapsed before fold");
        for (Index i = 0; i < std::min<Index>(2, band_rows_); ++i) {
            const double ba = actual_b(i);
            if (ba == 0.0) continue;
            for (Index j = 0; j < std::min<Index>(2, n_); ++j) {
                const double ca = actual_c(j);
                if (ca == 0.0) continue;
                const double add =
                    srow_(i) * scol_(j) * ba * ca / std::sqrt(drow_(i) * dcol_(j));
                set(i, j, get(i, j) + add);
                audit.fold_mults += 3;
            }
        }
        retire_vectors();
    }

    /// Direct fold for an update that is already confined to the band:
    /// bvec support within {n-2, n-1} and cvec support within {n-1}.
    void fold_in_band_tail() {
        const double ca = actual_c(n_ - 1);
        for (Index i = std::max<Index>(n_ - 2, 0); i < n_; ++i) {
            const double ba = actual_b(i);
            if (ba == 0.0 || ca == 0.0) continue;
            set(i, n_ - 1, get(i, n_ - 1) + ba * ca);  // unit scales here
            audit.fold_mults += 1;
        }
        retire_vectors();
    }

    bool update_confined_to_band() const {
        for (Index j = 0; j + 1 < n_; ++j)
            if (cvec_(j) != 0.0) return false;
        for (Index i = 0; i < m_; ++i)
            if (bvec_(i) != 0.0 && (i < n_ - 2 || i > n_ - 1)) return false;
        return true;
    }

    void phase2() {
        for (Index jcol = 0; jcol < n_; ++jcol) {
            if (jcol + 1 < band_rows_ && p1_(jcol) != 0.0) {
                rotate_rows(jcol + 1, jcol, jcol);
                chase_all(true);
            }
            if (jcol <= n_ - 3 && u2_(jcol) != 0.0) {
                rotate_cols(jcol + 2, jcol + 1, jcol);
                chase_all(true);
            }
        }
    }

    void normalize_signs() {
        if (audit.rotations == 0) return;
        for (Index i = 0; i < n_; ++i) {
            if (srow_(i) * scol_(i) * d_(i) < 0.0) {
                d_(i) = -d_(i);
                if (i <= n_ - 2) u1_(i) = -u1_(i);
                const Index partner = i + 1 < band_rows_ ? i + 1 : i - 1;
                left.push_back({GivensRotation::Side::Left, i, partner, -1.0, 0.0});
                ++audit.reflections;
            }
        }
    }

    BidiagonalMatrix extract(double tol_rel) {
        BidiagonalMatrix out(m_, n_);
        for (Index i = 0; i < n_; ++i)
            out.alpha(i) = srow_(i) * scol_(i) * std::sqrt(drow_(i) * dcol_(i)) * d_(i);
        for (Index i = 0; i + 1 < n_; ++i)
            out.beta(i) = srow_(i) * scol_(i + 1) * std::sqrt(drow_(i) * dcol_(i + 1)) * u1_(i);
        // everything else must have been chased off the band
        const double scale = std::sqrt(out.frobenius_sq());
        double spill = 0.0;
        for (Index i = 0; i < p1_.size(); ++i)
            if (i + 1 < band_rows_) spill = std::max(spill, std::abs(std::sqrt(drow_(i + 1) * dcol_(i)) * p1_(i)));
        for (Index i = 0; i < u2_.size(); ++i)
            spill = std::max(spill, std::abs(std::sqrt(drow_(i) * dcol_(i + 2)) * u2_(i)));
        bool bulge_left = false;
        for (const Bulge& b : bulges_) bulge_left = bulge_left || b.active;
        if (bulge_left || spill > tol_rel * std::max(scale, 1.0))
            throw std::runtime_error("bgu: residual off-band structure after reduction");
        return out;
    }

    void rescale_row(Index i) {
        if (drow_(i) >= kRescaleAt) return;
        const double s = std::sqrt(drow_(i));
        const Index clo = std::max<Index>(i - 2, 0);
        const Index chi = std::min<Index>(i + 3, n_ - 1);
        for (Index c = clo; c <= chi; ++c) {
            const double v = get(i, c);
            if (v != 0.0) {
                set(i, c, v * s);
                ++audit.mult_counter;
            }
        }
        if (vec_active_ && bvec_(i) != 0.0) {
            bvec_(i) *= s;
            ++audit.mult_counter;
        }
        drow_(i) = 1.0;
    }

    void rescale_col(Index j) {
        if (dcol_(j) >= kRescaleAt) return;
        const double s = std::sqrt(dcol_(j));
        const Index rlo = std::max<Index>(j - 3, 0);
        const Index rhi = std::min<Index>(j + 2, band_rows_ - 1);
        for (Index r = rlo; r <= rhi; ++r) {
            const double v = get(r, j);
            if (v != 0.0) {
                set(r, j, v * s);
                ++audit.mult_counter;
            }
        }
        if (vec_active_ && cvec_(j) != 0.0) {
            cvec_(j) *= s;
            ++audit.mult_counter;
        }
        dcol_(j) = 1.0;
    }

    Index band_rows() const { return band_rows_; }

private:
    template <typename Store>
    void rotate_pair(bool type1, double fa, double fb, double a, double b, Store&& store) {
        double na, nb;
        if (type1) {
            na = (a == 0.0) ? b : fb * a + b;
            nb = (b == 0.0) ? a : a + fa * b;
        } else {
            na = (b == 0.0) ? a : a + fb * b;
            nb = (a == 0.0) ? b : fa * a + b;
        }
        audit.mult_counter += (a != 0.0 ? 1 : 0) + (b != 0.0 ? 1 : 0);
        store(na, nb);
    }

    void bump_max(std::uint64_t before) {
        const std::uint64_t spent = audit.mult_counter - before;
        audit.max_mults_per_rotation = std::max(audit.max_mults_per_rotation, spent);
    }

    Index m_, n_, band_rows_;
    Vector d_, u1_, u2_, p1_;
    Vector bvec_, cvec_, drow_, dcol_, srow_, scol_;
    bool vec_active_ = true;
    std::array<Bulge, 4> bulges_;
    std::uint64_t bulge_seq_ = 0;
};

}  // namespace

BguResult bgu_update(const BidiagonalMatrix& B, const Vector& bhat, const Vector& chat) {
    const Index m = B.rows, n = B.cols;
    if (bhat.size() != m || chat.size() != n)
        throw std::invalid_argument("bgu_update: update vector dimensions do not match the band");
    if (m < n) throw std::invalid_argument("bgu_update: requires m >= n");
    if (!bhat.allFinite() || !chat.allFinite() || !B.alpha.allFinite() || !B.beta.allFinite())
        throw std::invalid_argument("bgu_update: non-finite input");

    BguResult out;
    if (bhat.isZero(0.0) || chat.isZero(0.0)) {  // nothing to do
        out.Bnew = B;
        return out;
    }

    Workspace ws(B, bhat, chat);

    if (ws.update_confined_to_band()) {
        // B + bhat chat^T is already bidiagonal: no reduction needed
        ws.fold_in_band_tail();
    } else {
        // phase 1: both vectors are reduced toward index 0 on a shared
        // descending front. Column eliminations run first at each front
        // and their cascades climb into the not-yet-processed region,
        // where both vectors are still dense; row eliminations follow
        // and their cascades fall into the already-zeroed region. Column
        // 0 is never rotated, which pins the result to the same band a
        // Householder reduction of B + bhat chat^T produces. Rotations
        // beyond row n (the spike of a tall update) touch only the
        // vector itself.
        for (Index k = std::max(m, n) - 1; k >= 1; --k) {
            if (k <= m - 1) {
                const std::uint64_t pre = ws.audit.rotations;
                ws.rotate_rows(k, k - 1, Workspace::kPivotVec);
                if (k >= n) ws.audit.spike_rotations += ws.audit.rotations - pre;
                ws.chase_all(true);
            }
            if (k >= 2 && k <= n - 1) {
                ws.rotate_cols(k, k - 1, Workspace::kPivotVec);
                ws.chase_all(true);
            }
        }
        ws.fold_rank1();
        ws.phase2();
    }

    ws.normalize_signs();

    out.Bnew = ws.extract(1e-12);
    out.left = std::move(ws.left);
    out.right = std::move(ws.right);
    out.audit = ws.audit;
    return out;
}

Matrix apply_rotations(const Matrix& M, const std::vector<GivensRotation>& rots,
                       GivensRotation::Side side, bool transpose) {
    Matrix A = M;
    const Index dim = side == GivensRotation::Side::Left ? A.rows() : A.cols();
    for (const GivensRotation& g : rots) {
        if (g.i < 0 || g.i >= dim || g.j < 0 || g.j >= dim)
            throw std::invalid_argument("apply_rotations: index out of range");
        if (g.c == -1.0 && g.s == 0.0) {
            if (side == GivensRotation::Side::Left) A.row(g.i) = -A.row(g.i);
            else A.col(g.i) = -A.col(g.i);
            continue;
        }
        const double s = transpose ? -g.s : g.s;
        if (side == GivensRotation::Side::Left) {
            Eigen::RowVectorXd ri = A.row(g.i);
            A.row(g.i) = g.c * ri - s * A.row(g.j);
            A.row(g.j) = s * ri + g.c * A.row(g.j);
        } else {
            Vector ci = A.col(g.i);
            A.col(g.i) = g.c * ci - s * A.col(g.j);
            A.col(g.j) = s * ci + g.c * A.col(g.j);
        }
    }
    return A;
}

}  // namespace bdup
