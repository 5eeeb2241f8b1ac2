#include "terp/linalg.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace terp;

TEST_CASE("rank and orthonormal basis") {
    Tolerance tol;
    CMatrix m(3, 2);
    m << Complex(1, 0), Complex(2, 0),
         Complex(0, 1), Complex(0, 2),
         Complex(1, 1), Complex(2, 2);
    REQUIRE(linalg::rank(m, tol) == 1);
    CMatrix b = linalg::orthonormal_basis(m, tol);
    REQUIRE(b.cols() == 1);
    REQUIRE_THAT((b.adjoint() * b)(0, 0).real(), Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("intersection of planes in C^3") {
    Tolerance tol;
    CMatrix a(3, 2), b(3, 2);
    a << 1, 0, 0, 1, 0, 0;   // span(e1, e2)
    b << 0, 0, 1, 0, 0, 1;   // span(e2, e3)
    CMatrix inter = linalg::intersect(a, b, tol);
    REQUIRE(inter.cols() == 1);
    CMatrix e2(3, 1);
    e2 << 0, 1, 0;
    REQUIRE(linalg::same_subspace(inter, e2, tol));
}

TEST_CASE("kernel and containment") {
    Tolerance tol;
    CMatrix m(2, 3);
    m << 1, 0, 1,
         0, 1, 1;
    CMatrix k = linalg::kernel(m, tol);
    REQUIRE(k.cols() == 1);
    REQUIRE((m * k).norm() < 1e-12);
    REQUIRE(linalg::contains(CMatrix(CMatrix::Identity(3, 3)), k, tol));
}

TEST_CASE("bilinear complement") {
    Tolerance tol;
    CMatrix s(2, 2);
    s << 0, 1, -1, 0;
    CMatrix line(2, 1);
    line << 1, 0;
    CMatrix full = CMatrix::Identity(2, 2);
    CMatrix perp = linalg::bilinear_complement_in(line, full, s, tol);
    // S(e1, v) = v_2, so the complement is span(e1) itself
    REQUIRE(perp.cols() == 1);
    REQUIRE(linalg::same_subspace(perp, line, tol));
}

TEST_CASE("nilpotent exponential inverts") {
    Tolerance tol;
    RMatrix n(3, 3);
    n.setZero();
    n(0, 1) = 2.0;
    n(1, 2) = -1.0;
    RMatrix e = linalg::nilpotent_exp(n, tol);
    RMatrix em = linalg::nilpotent_exp(RMatrix(-n), tol);
    REQUIRE((e * em - RMatrix::Identity(3, 3)).norm() < 1e-14);
    REQUIRE(linalg::nilpotency_index(n, tol) == 3);
}

TEST_CASE("positive definiteness verdicts") {
    Tolerance tol;
    CMatrix g = CMatrix::Identity(2, 2);
    REQUIRE(linalg::positive_definite(g, tol) == Verdict::yes);
    g(1, 1) = -1.0;
    REQUIRE(linalg::positive_definite(g, tol) == Verdict::no);
    g(1, 1) = 1e-14;
    REQUIRE(linalg::positive_definite(g, tol) == Verdict::indeterminate);
}

TEST_CASE("subspace operations on random data") {
    Tolerance tol;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 25; ++trial) {
        int n = 4 + static_cast<int>(rng() % 3);
        CMatrix a(n, 2), b(n, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 2; ++j) {
                a(i, j) = Complex(nd(rng), nd(rng));
                b(i, j) = Complex(nd(rng), nd(rng));
            }
        b.col(0) = a.col(0);  // force a shared line
        CMatrix inter = linalg::intersect(a, b, tol);
        REQUIRE(inter.cols() >= 1);
        REQUIRE(linalg::contains(a, inter, tol));
        REQUIRE(linalg::contains(b, inter, tol));
        CMatrix sum = linalg::subspace_sum(a, b, tol);
        REQUIRE(linalg::rank(sum, tol) ==
                linalg::rank(a, tol) + linalg::rank(b, tol) - inter.cols());
    }
}
