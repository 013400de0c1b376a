#include "doctest.h"

#include "bdup/jacobi_svd.hpp"
#include "bdup/tracking.hpp"
#include "test_util.hpp"

#include <random>

using namespace bdup;

TEST_CASE("initial state represents the zero matrix") {
    TrackedFactorization t(4, 4, 2);
    CHECK(t.Q() == Matrix::Identity(4, 4).leftCols(2));
    CHECK(t.P() == Matrix::Identity(4, 4).leftCols(2));
    CHECK(t.band().frobenius_sq() == 0.0);
    CHECK(t.dense().norm() == 0.0);
    CHECK(t.residual(0.0) == 0.0);
    auto [dq, dp] = t.drift_check();
    CHECK(dq <= 1e-15);
    CHECK(dp <= 1e-15);
    CHECK_THROWS_AS(TrackedFactorization(4, 4, 5), std::invalid_argument);
}

TEST_CASE("projection splits a vector against the tracked bases") {
    TrackedFactorization t(8, 6, 3);
    Vector inspan = Vector::Zero(8);
    inspan.head(3) = test::random_vector(3, 21);
    auto pr = t.project(inspan, Vector::Ones(6));
    CHECK(pr.delta <= 1e-12 * inspan.norm());

    Vector ortho = Vector::Zero(8);
    ortho.tail(5) = test::random_vector(5, 22);
    auto pr2 = t.project(ortho, Vector::Ones(6));
    CHECK(pr2.bhat.norm() <= 1e-12 * ortho.norm());
    CHECK(pr2.delta == doctest::Approx(ortho.norm()));

    Vector b = test::random_vector(8, 23), c = test::random_vector(6, 24);
    auto pr3 = t.project(b, c);
    CHECK((t.Q() * pr3.bhat + pr3.bperp - b).norm() <= 1e-12 * b.norm());
    CHECK((t.P() * pr3.chat + pr3.cperp - c).norm() <= 1e-12 * c.norm());
}

TEST_CASE("single rank-1 event is captured exactly") {
    TrackedFactorization t(7, 5, 3);
    Vector b = test::random_vector(7, 31), c = test::random_vector(5, 32);
    t.update(UpdateEvent::dense(b, c));
    CHECK(std::sqrt(t.band().frobenius_sq()) ==
          doctest::Approx(b.norm() * c.norm()).epsilon(1e-10));
    CHECK((t.dense() - b * c.transpose()).norm() <= 1e-10 * (b.norm() * c.norm()));
    // best rank-1 of b c^T is itself
    auto [dq, dp] = t.drift_check();
    CHECK(dq <= 1e-10);
    CHECK(dp <= 1e-10);
}

TEST_CASE("in-span events use the pure middle update") {
    TrackedFactorization t(6, 6, 3);
    t.update(UpdateEvent::dense(Vector::Unit(6, 0), Vector::Unit(6, 1)));
    t.update(UpdateEvent::dense(Vector::Unit(6, 1), Vector::Unit(6, 0)));
    // both b and c lie inside the current spans now
    Matrix before = t.dense();
    Vector b = t.Q() * test::random_vector(3, 41);
    Vector c = t.P() * test::random_vector(3, 42);
    t.update(UpdateEvent::dense(b, c));
    CHECK((t.dense() - (before + b * c.transpose())).norm() <= 1e-10);
}

TEST_CASE("exact-rank stream keeps machine-precision residuals") {
    const Index n = 40, r = 10;
    std::mt19937_64 gen(51);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    TrackedFactorization t(n, n, r);
    Matrix A = Matrix::Zero(n, n);
    double cum = 0.0;
    for (int h = 0; h < 30; ++h) {
        // events confined to an 8-dimensional column space
        Vector b(n);
        for (Index i = 0; i < n; ++i) b(i) = dist(gen);
        Vector c = Vector::Zero(n);
        c(h % 8) = 1.0;
        A += b * c.transpose();
        t.update(UpdateEvent::dense(b, c));
        cum += t.residual(A.norm());
        CHECK((t.dense() - A).norm() <= 1e-7 * A.norm());
    }
    CHECK(cum <= 1e-8);
}

TEST_CASE("over-rank stream: residual equals the dense gap") {
    const Index n = 12, r = 3;
    TrackedFactorization t(n, n, r);
    Matrix A = Matrix::Zero(n, n);
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int h = 0; h < 8; ++h) {
        Vector b(n), c(n);
        for (Index i = 0; i < n; ++i) {
            b(i) = dist(gen);
            c(i) = dist(gen);
        }
        A += b * c.transpose();
        t.update(UpdateEvent::dense(b, c));
    }
    const double resid = t.residual(A.norm());
    CHECK(resid == doctest::Approx(std::abs(A.norm() - std::sqrt(t.band().frobenius_sq()))));
    // Eckart-Young floor on the represented matrix
    auto svd = jacobi_svd(A, 1e-12);
    const double floor_sq = svd.sigma.tail(n - r).squaredNorm();
    CHECK((A - t.dense()).squaredNorm() >= floor_sq - 1e-9);
}

TEST_CASE("deflation drops the smallest pair, ties toward the larger index") {
    // engineered band: column norms 4, 1, 1 -> drop index 2
    TrackedFactorization t(6, 6, 2);
    t.update(UpdateEvent::dense(2.0 * Vector::Unit(6, 0), Vector::Unit(6, 0)));
    t.update(UpdateEvent::dense(1.0 * Vector::Unit(6, 1), Vector::Unit(6, 1)));
    t.update(UpdateEvent::dense(1.0 * Vector::Unit(6, 2), Vector::Unit(6, 2)));
    // rank-3 truth truncated to rank 2 keeps the two dominant directions
    Vector sv = jacobi_svd(t.dense(), 1e-12).sigma;
    CHECK(sv(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(sv(1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("augmentation threshold branches agree across the boundary") {
    const Index n = 10, r = 4;
    Vector base_b = test::random_vector(n, 71), base_c = test::random_vector(n, 72);
    auto run = [&](double eps) {
        TrackedFactorization t(n, n, r);
        t.update(UpdateEvent::dense(base_b, base_c));
        // second event nearly inside the span: b = Q y + eps * q_perp
        Vector inplane = t.Q() * test::random_vector(r, 73);
        Vector perp = Vector::Unit(n, n - 1);
        perp -= t.Q() * (t.Q().transpose() * perp);
        perp.normalize();
        Vector b = inplane + eps * perp;
        Vector c = t.P() * test::random_vector(r, 74);
        t.update(UpdateEvent::dense(b, c));
        return t.dense();
    };
    Matrix lo = run(1e-14);  // below the augmentation threshold
    Matrix hi = run(1e-11);  // above it
    CHECK((lo - hi).norm() <= 1e-10 * std::max(1.0, lo.norm()));
}

TEST_CASE("reorthogonalization restores orthonormality and the representation") {
    const Index n = 30, r = 6;
    TrackedFactorization t(n, n, r);
    std::mt19937_64 gen(81);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix A = Matrix::Zero(n, n);
    for (int h = 0; h < 40; ++h) {
        Vector b(n);
        for (Index i = 0; i < n; ++i) b(i) = dist(gen);
        Vector c = Vector::Zero(n);
        c(h % 5) = 1.0;
        A += b * c.transpose();
        t.update(UpdateEvent::dense(b, c));
    }
    Matrix before = t.dense();
    t.reorthogonalize();
    auto [dq, dp] = t.drift_check();
    CHECK(dq <= 1e-12);
    CHECK(dp <= 1e-12);
    CHECK((t.dense() - before).norm() <= 1e-9 * std::max(1.0, before.norm()));
}

TEST_CASE("long stream under the adaptive policy keeps drift bounded") {
    const Index n = 60, r = 8;
    TrackedFactorization never(n, n, r, ReorthPolicy::never());
    TrackedFactorization adapt(n, n, r, ReorthPolicy::adaptive(1e-8));
    std::mt19937_64 gen(91);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix A = Matrix::Zero(n, n);
    for (int h = 0; h < 300; ++h) {
        Vector b(n);
        for (Index i = 0; i < n; ++i) b(i) = dist(gen);
        Vector c = Vector::Zero(n);
        c(h % 6) = 1.0;
        A += b * c.transpose();
        UpdateEvent ev = UpdateEvent::dense(b, c);
        never.update(ev);
        adapt.update(ev);
    }
    auto [dq, dp] = adapt.drift_check();
    CHECK(std::max(dq, dp) <= 1e-6);
    CHECK(std::abs(never.residual(A.norm()) - adapt.residual(A.norm())) <= 1e-6);
}

TEST_CASE("incremental svd baseline agrees with the tracker") {
    const Index n = 20, r = 6;
    TrackedFactorization t(n, n, r);
    IncrementalSvdBaseline s(n, n, r);
    std::mt19937_64 gen(101);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix A = Matrix::Zero(n, n);
    for (int h = 0; h < 25; ++h) {
        Vector b(n);
        for (Index i = 0; i < n; ++i) b(i) = dist(gen);
        Vector c = Vector::Zero(n);
        c(h % 4) = 1.0;
        A += b * c.transpose();
        UpdateEvent ev = UpdateEvent::dense(b, c);
        t.update(ev);
        s.update(ev);
        CHECK((t.dense() - s.dense()).norm() <= 1e-7 * std::max(1.0, A.norm()));
    }
    CHECK(s.residual(A.norm()) <= 1e-8 * std::max(1.0, A.norm()));
}

TEST_CASE("sparse events and validation") {
    TrackedFactorization t(5, 4, 2);
    auto ev = UpdateEvent::sparse(2, 1, 3.5, 5, 4);
    CHECK(ev.b(2) == 3.5);
    CHECK(ev.c(1) == 1.0);
    t.update(ev);
    CHECK(t.dense()(2, 1) == doctest::Approx(3.5));
    CHECK_THROWS_AS(UpdateEvent::sparse(9, 0, 1.0, 5, 4), std::invalid_argument);
    CHECK_THROWS_AS(UpdateEvent::sparse(0, 0, std::nan(""), 5, 4), std::invalid_argument);
    Vector bad = Vector::Ones(5);
    bad(0) = std::numeric_limits<double>::infinity();
    Matrix before = t.dense();
    CHECK_THROWS_AS(t.update(UpdateEvent::dense(bad, Vector::Ones(4))), std::invalid_argument);
    CHECK(t.dense() == before);  // tracker unchanged on a rejected event
}
