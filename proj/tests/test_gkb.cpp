#include "doctest.h"

#include "bdup/bidiagonalize.hpp"
#include "bdup/gkb.hpp"
#include "test_util.hpp"

#include <random>

using namespace bdup;

namespace {

Matrix random_sparse(Index m, Index n, double density, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Matrix A = Matrix::Zero(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i)
            if (coin(gen) < density) A(i, j) = val(gen);
    return A;
}

}  // namespace

TEST_CASE("diagonal matrix breaks down after one step") {
    Matrix A = Vector::LinSpaced(4, 1.0, 4.0).asDiagonal();
    auto r = gkb(A, Vector::Unit(4, 0), 4, Reorth::None);
    CHECK(r.breakdown);
    CHECK(r.steps == 1);
    CHECK(r.B.alpha(0) == doctest::Approx(1.0));
}

TEST_CASE("full reorthogonalization reconstructs a sparse matrix") {
    Matrix A = random_sparse(100, 60, 0.08, 41);
    auto r = gkb(A, Vector::Unit(60, 0), 60, Reorth::Full);
    REQUIRE(r.steps == 60);
    CHECK((r.Q * r.B.dense() * r.P.transpose() - A).norm() <= 1e-8 * A.norm());
    CHECK(orthogonality_drift(r.Q) <= 1e-10);
    CHECK(orthogonality_drift(r.P) <= 1e-10);
}

TEST_CASE("drift without reorthogonalization is at least the full-reorth drift") {
    Matrix A = random_sparse(100, 60, 0.08, 43);
    auto full = gkb(A, Vector::Unit(60, 0), 60, Reorth::Full);
    auto none = gkb(A, Vector::Unit(60, 0), 60, Reorth::None);
    const Index k = std::min(full.steps, none.steps);
    CHECK(orthogonality_drift(none.Q.leftCols(k)) >= orthogonality_drift(full.Q.leftCols(k)));
}

TEST_CASE("short-space reorthogonalization keeps P clean") {
    Matrix A = random_sparse(120, 40, 0.1, 47);
    auto r = gkb(A, Vector::Unit(40, 0), 40, Reorth::ShortSpace);
    CHECK(orthogonality_drift(r.P) <= 1e-8);
}

TEST_CASE("recurrences hold columnwise") {
    Matrix A = test::random_matrix(30, 20, 53);
    auto r = gkb(A, Vector::Unit(20, 0), 10, Reorth::Full);
    REQUIRE(r.steps == 10);
    for (Index k = 0; k < 9; ++k) {
        // A p_k = beta_{k-1} q_{k-1} + alpha_k q_k
        Vector lhs = A * r.P.col(k);
        Vector rhs = r.B.alpha(k) * r.Q.col(k);
        if (k > 0) rhs += r.B.beta(k - 1) * r.Q.col(k - 1);
        CHECK((lhs - rhs).norm() <= 1e-10 * A.norm());
        // A^T q_k = alpha_k p_k + beta_k p_{k+1}
        Vector lhs2 = A.transpose() * r.Q.col(k);
        Vector rhs2 = r.B.alpha(k) * r.P.col(k) + r.B.beta(k) * r.P.col(k + 1);
        CHECK((lhs2 - rhs2).norm() <= 1e-10 * A.norm());
    }
}

TEST_CASE("matches the dense factorization from the e1 start") {
    Matrix A = test::random_matrix(25, 15, 59);
    auto dense = bidiagonalize_dense(A);
    auto kry = gkb(A, Vector::Unit(15, 0), 15, Reorth::Full);
    REQUIRE(kry.steps == 15);
    for (Index i = 0; i < 15; ++i)
        CHECK(std::abs(kry.B.alpha(i)) ==
              doctest::Approx(std::abs(dense.B.alpha(i))).epsilon(1e-8));
    for (Index i = 0; i < 14; ++i)
        CHECK(std::abs(kry.B.beta(i)) == doctest::Approx(std::abs(dense.B.beta(i))).epsilon(1e-8));
}

TEST_CASE("input validation") {
    Matrix A = test::random_matrix(5, 4, 61);
    CHECK_THROWS_AS(gkb(A, 2.0 * Vector::Unit(4, 0), 2, Reorth::None), std::invalid_argument);
    CHECK_THROWS_AS(gkb(A, Vector::Unit(4, 0), 5, Reorth::None), std::invalid_argument);
}
