#include "doctest.h"

#include "bdup/bgu.hpp"
#include "bdup/bidiagonalize.hpp"
#include "test_util.hpp"

using namespace bdup;

namespace {

Matrix replay(const BidiagonalMatrix& B, const Vector& b, const Vector& c, const BguResult& res) {
    Matrix A = B.dense() + b * c.transpose();
    A = apply_rotations(A, res.left, GivensRotation::Side::Left);
    A = apply_rotations(A, res.right, GivensRotation::Side::Right);
    return A;
}

void check_exactness(const BidiagonalMatrix& B, const Vector& b, const Vector& c) {
    auto res = bgu_update(B, b, c);
    Matrix got = replay(B, b, c, res);
    const double scale = std::max(1.0, (B.dense() + b * c.transpose()).norm());
    CHECK((got - res.Bnew.dense()).norm() <= 1e-10 * scale);
    CHECK(res.audit.mult_counter <= 10 * std::max<std::uint64_t>(res.audit.rotations, 1));
    if (res.audit.rotations > 0)
        for (Index i = 0; i < res.Bnew.alpha.size(); ++i) CHECK(res.Bnew.alpha(i) >= 0.0);
    // Frobenius mass is preserved
    CHECK(std::sqrt(res.Bnew.frobenius_sq()) ==
          doctest::Approx((B.dense() + b * c.transpose()).norm()).epsilon(1e-12));
}

}  // namespace

TEST_CASE("givens coefficients") {
    auto [c0, s0] = givens(0.0, 5.0);
    CHECK(c0 == doctest::Approx(1.0));
    CHECK(s0 == doctest::Approx(0.0));
    auto [c1, s1] = givens(3.0, 4.0);
    CHECK(c1 == doctest::Approx(0.8));
    CHECK(s1 == doctest::Approx(0.6));
    CHECK(c1 * 3.0 - s1 * 4.0 == doctest::Approx(0.0));
    CHECK(s1 * 3.0 + c1 * 4.0 == doctest::Approx(5.0));
    auto [cz, sz] = givens(0.0, 0.0);
    CHECK(cz == 1.0);
    CHECK(sz == 0.0);
    CHECK_THROWS_AS(givens(std::nan(""), 1.0), std::invalid_argument);

    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        Vector g = test::random_vector(2, 900 + seed);
        auto [c, s] = givens(g(0), g(1));
        CHECK(std::abs(c * g(0) - s * g(1)) <= 1e-14 * g.norm());
        CHECK(std::abs(std::abs(s * g(0) + c * g(1)) - g.norm()) <= 1e-14 * g.norm());
        CHECK(c * c + s * s == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("apply_rotations basics") {
    Matrix M = test::random_matrix(5, 5, 911);
    CHECK(apply_rotations(M, {}, GivensRotation::Side::Left) == M);

    GivensRotation g{GivensRotation::Side::Left, 1, 3, 0.8, 0.6};
    Matrix G = apply_rotations(Matrix::Identity(5, 5), {g}, GivensRotation::Side::Left);
    CHECK(G(1, 1) == doctest::Approx(0.8));
    CHECK(G(1, 3) == doctest::Approx(-0.6));
    CHECK(G(3, 1) == doctest::Approx(0.6));
    CHECK(G(3, 3) == doctest::Approx(0.8));

    std::vector<GivensRotation> rots;
    for (std::uint64_t k = 0; k < 8; ++k) {
        Vector g2 = test::random_vector(2, 920 + k);
        auto [c, s] = givens(g2(0), g2(1));
        rots.push_back({GivensRotation::Side::Left, static_cast<Index>(k % 5),
                        static_cast<Index>((k + 2) % 5), c, s});
    }
    Matrix fwd = apply_rotations(M, rots, GivensRotation::Side::Left);
    std::vector<GivensRotation> rev(rots.rbegin(), rots.rend());
    Matrix back = apply_rotations(fwd, rev, GivensRotation::Side::Left, true);
    CHECK((back - M).norm() <= 1e-12 * M.norm());

    CHECK_THROWS_AS(apply_rotations(M, {GivensRotation{GivensRotation::Side::Left, 0, 9, 1, 0}},
                                    GivensRotation::Side::Left),
                    std::invalid_argument);
}

TEST_CASE("no-op updates produce the input band with empty logs") {
    BidiagonalMatrix B = test::random_band(6, 6, 931);
    auto r1 = bgu_update(B, Vector::Zero(6), test::random_vector(6, 932));
    CHECK(r1.left.empty());
    CHECK(r1.right.empty());
    CHECK(r1.Bnew.alpha == B.alpha);
    CHECK(r1.Bnew.beta == B.beta);
    CHECK(r1.audit.mult_counter == 0);
    auto r2 = bgu_update(B, test::random_vector(6, 933), Vector::Zero(6));
    CHECK(r2.left.empty());
    CHECK(r2.Bnew.alpha == B.alpha);
}

TEST_CASE("already-bidiagonal update needs no rotations") {
    BidiagonalMatrix B = test::random_band(6, 6, 941);
    Vector b = Vector::Zero(6), c = Vector::Zero(6);
    const double g = 0.7, gbar = -1.3;
    b(5) = g;
    c(5) = gbar;
    auto res = bgu_update(B, b, c);
    CHECK(res.audit.rotations == 0);
    CHECK(res.Bnew.alpha(5) == doctest::Approx(B.alpha(5) + g * gbar));
    for (Index i = 0; i < 5; ++i) CHECK(res.Bnew.alpha(i) == B.alpha(i));
    CHECK(res.Bnew.beta == B.beta);

    // b in span{e_{n-1}, e_n} adds one superdiagonal entry as well
    b(4) = 0.4;
    auto res2 = bgu_update(B, b, c);
    CHECK(res2.audit.rotations == 0);
    CHECK(res2.Bnew.beta(4) == doctest::Approx(B.beta(4) + 0.4 * gbar));
}

TEST_CASE("square dense updates match the dense bidiagonalization") {
    for (std::uint64_t seed : {951u, 952u, 953u}) {
        BidiagonalMatrix B = test::random_band(12, 12, seed);
        Vector b = test::random_vector(12, seed + 10), c = test::random_vector(12, seed + 20);
        check_exactness(B, b, c);

        auto res = bgu_update(B, b, c);
        auto dense = bidiagonalize_dense(B.dense() + b * c.transpose());
        for (Index i = 0; i < 12; ++i)
            CHECK(std::abs(res.Bnew.alpha(i)) ==
                  doctest::Approx(std::abs(dense.B.alpha(i))).epsilon(1e-9));
        for (Index i = 0; i < 11; ++i)
            CHECK(std::abs(res.Bnew.beta(i)) ==
                  doctest::Approx(std::abs(dense.B.beta(i))).epsilon(1e-9));
    }
}

TEST_CASE("tall updates annihilate the spike without touching the band") {
    const Index m = 20, n = 12;
    BidiagonalMatrix B = test::random_band(m, n, 961);
    Vector b = test::random_vector(m, 962), c = test::random_vector(n, 963);
    auto res = bgu_update(B, b, c);
    check_exactness(B, b, c);
    CHECK(res.audit.spike_rotations == static_cast<std::uint64_t>(m - n));
    // spike rotations only reference rows beyond the band
    std::uint64_t beyond = 0;
    for (const auto& g : res.left)
        if (g.i > n || g.j > n) ++beyond;
    CHECK(beyond >= static_cast<std::uint64_t>(m - n - 1));
}

TEST_CASE("sparse vectors trigger the permutation shortcut") {
    BidiagonalMatrix B = test::random_band(10, 10, 971);
    Vector b = Vector::Zero(10), c = Vector::Zero(10);
    b(2) = 1.5;
    c(4) = -0.5;
    auto res = bgu_update(B, b, c);
    check_exactness(B, b, c);
    CHECK(res.audit.permutations > 0);
}

TEST_CASE("small and degenerate shapes") {
    check_exactness(test::random_band(1, 1, 981), test::random_vector(1, 982),
                    test::random_vector(1, 983));
    check_exactness(test::random_band(4, 1, 984), test::random_vector(4, 985),
                    test::random_vector(1, 986));
    check_exactness(test::random_band(2, 2, 987), test::random_vector(2, 988),
                    test::random_vector(2, 989));
    check_exactness(test::random_band(3, 2, 990), test::random_vector(3, 991),
                    test::random_vector(2, 992));
    CHECK_THROWS_AS(bgu_update(test::random_band(3, 5, 1), test::random_vector(3, 2),
                               test::random_vector(5, 3)),
                    std::invalid_argument);
}

TEST_CASE("random rectangular batch: exactness, locality, rotation budget") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const Index n = 5 + static_cast<Index>(seed);
        const Index m = n + static_cast<Index>(seed % 3) * 4;
        BidiagonalMatrix B = test::random_band(m, n, 1000 + seed);
        Vector b = test::random_vector(m, 1100 + seed), c = test::random_vector(n, 1200 + seed);
        check_exactness(B, b, c);
        auto res = bgu_update(B, b, c);
        const double nn = static_cast<double>(n);
        CHECK(static_cast<double>(res.audit.rotations) <=
              6.0 * nn * nn + 4.0 * static_cast<double>(m + n));
        CHECK(res.audit.max_mults_per_rotation <= 10);
    }
}

TEST_CASE("determinism: identical inputs give identical logs") {
    BidiagonalMatrix B = test::random_band(9, 9, 1301);
    Vector b = test::random_vector(9, 1302), c = test::random_vector(9, 1303);
    auto a = bgu_update(B, b, c);
    auto d = bgu_update(B, b, c);
    REQUIRE(a.left.size() == d.left.size());
    for (std::size_t i = 0; i < a.left.size(); ++i) {
        CHECK(a.left[i].c == d.left[i].c);
        CHECK(a.left[i].s == d.left[i].s);
        CHECK(a.left[i].i == d.left[i].i);
    }
}

TEST_CASE("quadratic flop scaling against the cubic dense baseline") {
    // compact version of the full acceptance scaling run
    std::vector<double> ns, bgu_m, dense_m;
    for (Index n : {60, 120, 240}) {
        BidiagonalMatrix B = test::random_band(n, n, 1400 + n);
        Vector b = test::random_vector(n, 1401 + n), c = test::random_vector(n, 1402 + n);
        auto res = bgu_update(B, b, c);
        auto dn = bidiagonalize_dense(B.dense() + b * c.transpose());
        ns.push_back(std::log(static_cast<double>(n)));
        bgu_m.push_back(std::log(static_cast<double>(res.audit.mult_counter)));
        dense_m.push_back(std::log(static_cast<double>(dn.mults)));
    }
    auto slope = [&](const std::vector<double>& y) {
        const double sx = ns[2] - ns[0];
        return (y[2] - y[0]) / sx;
    };
    INFO("bgu slope=", slope(bgu_m), " dense slope=", slope(dense_m));
    CHECK(slope(bgu_m) >= 1.7);
    CHECK(slope(bgu_m) <= 2.3);
    CHECK(slope(dense_m) >= 2.6);
}
