#include "doctest.h"

#include "bdup/jacobi_svd.hpp"
#include "test_util.hpp"

using namespace bdup;

TEST_CASE("diagonal matrix: sorted singular values") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 3;
    A(1, 1) = 1;
    A(2, 2) = 2;
    auto svd = jacobi_svd(A, 1e-12);
    CHECK(svd.sigma(0) == doctest::Approx(3.0));
    CHECK(svd.sigma(1) == doctest::Approx(2.0));
    CHECK(svd.sigma(2) == doctest::Approx(1.0));
}

TEST_CASE("orthogonal matrix: unit spectrum") {
    Matrix A(2, 2);
    const double th = 0.7;
    A << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    auto svd = jacobi_svd(A, 1e-12);
    CHECK(svd.sigma(0) == doctest::Approx(1.0));
    CHECK(svd.sigma(1) == doctest::Approx(1.0));
}

TEST_CASE("random 20x15: residual and orthogonality") {
    Matrix A = test::random_matrix(20, 15, 71);
    auto svd = jacobi_svd(A, 1e-12);
    CHECK((svd.U * svd.sigma.asDiagonal() * svd.V.transpose() - A).norm() <= 1e-12 * A.norm());
    // U columns are orthogonal only to the sweep tolerance; V accumulates
    // exact rotations
    CHECK(orthogonality_drift(svd.U) <= 1e-10);
    CHECK(orthogonality_drift(svd.V) <= 1e-12);
    for (Index i = 0; i + 1 < svd.sigma.size(); ++i) CHECK(svd.sigma(i) >= svd.sigma(i + 1));
}

TEST_CASE("short-fat and rank-deficient inputs") {
    Matrix A = test::random_matrix(6, 11, 73);
    auto svd = jacobi_svd(A, 1e-12);
    CHECK(svd.U.rows() == 6);
    CHECK(svd.V.rows() == 11);
    CHECK((svd.U * svd.sigma.asDiagonal() * svd.V.transpose() - A).norm() <= 1e-12 * A.norm());

    Matrix low = test::random_matrix(8, 2, 79) * test::random_matrix(2, 8, 83);
    auto s2 = jacobi_svd(low, 1e-12);
    CHECK(s2.sigma(2) <= 1e-12 * s2.sigma(0));
    CHECK((s2.U * s2.sigma.asDiagonal() * s2.V.transpose() - low).norm() <= 1e-11 * low.norm());
    CHECK(orthogonality_drift(s2.U) <= 1e-10);  // completed columns stay orthonormal
}
