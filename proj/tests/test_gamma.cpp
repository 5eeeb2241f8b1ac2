#include "terp/gammafn.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace terp;

TEST_CASE("log gamma at classical points") {
    REQUIRE_THAT(gamma_fn(Complex(1, 0)).real(), Catch::Matchers::WithinRel(1.0, 1e-14));
    REQUIRE_THAT(gamma_fn(Complex(0.5, 0)).real(),
                 Catch::Matchers::WithinRel(std::sqrt(kPi), 1e-14));
    REQUIRE_THAT(gamma_fn(Complex(5, 0)).real(), Catch::Matchers::WithinRel(24.0, 1e-13));
    // reflection-free window used by the twist: Re in (0,1]
    REQUIRE_THAT(gamma_fn(Complex(0.25, 0)).real(),
                 Catch::Matchers::WithinRel(3.6256099082219083, 1e-13));
    // complex argument against |Gamma(1+iy)|^2 = pi y / sinh(pi y)
    double y = 0.7;
    Complex g = gamma_fn(Complex(1.0, y));
    double expect = kPi * y / std::sinh(kPi * y);
    REQUIRE_THAT(std::norm(g), Catch::Matchers::WithinRel(expect, 1e-12));
}

TEST_CASE("polygamma against constants") {
    const double euler = 0.5772156649015329;
    REQUIRE_THAT(polygamma(0, Complex(1, 0)).real(),
                 Catch::Matchers::WithinAbs(-euler, 1e-13));
    REQUIRE_THAT(polygamma(0, Complex(0.5, 0)).real(),
                 Catch::Matchers::WithinAbs(-euler - 2.0 * std::log(2.0), 1e-13));
    REQUIRE_THAT(polygamma(1, Complex(1, 0)).real(),
                 Catch::Matchers::WithinRel(kPi * kPi / 6.0, 1e-12));
    REQUIRE_THAT(polygamma(1, Complex(0.5, 0)).real(),
                 Catch::Matchers::WithinRel(kPi * kPi / 2.0, 1e-12));
    // psi''(1) = -2 zeta(3)
    REQUIRE_THAT(polygamma(2, Complex(1, 0)).real(),
                 Catch::Matchers::WithinRel(-2.0 * 1.2020569031595943, 1e-11));
}

TEST_CASE("polygamma matches finite differences of log gamma") {
    // independent oracle: central differences of the Lanczos log gamma
    for (Complex z : {Complex(0.3, 0.0), Complex(1.0, 0.2), Complex(0.8, -0.5)}) {
        double h = 1e-5;
        Complex fd1 = (log_gamma(z + h) - log_gamma(z - h)) / (2.0 * h);
        // oracle truncation: h^2 |psi''| / 6 ~ 1.3e-9 at z = 0.3
        REQUIRE_THAT(std::abs(polygamma(0, z) - fd1), Catch::Matchers::WithinAbs(0.0, 5e-9));
        Complex fd2 = (log_gamma(z + h) - 2.0 * log_gamma(z) + log_gamma(z - h)) / (h * h);
        REQUIRE_THAT(std::abs(polygamma(1, z) - fd2), Catch::Matchers::WithinAbs(0.0, 5e-5));
    }
}

TEST_CASE("matrix gamma on nilpotent arguments") {
    Tolerance tol;
    // N = 0: scalar Gamma
    CMatrix z = CMatrix::Zero(2, 2);
    CMatrix g = matrix_gamma(Complex(0.5, 0), z, tol);
    REQUIRE((g - std::sqrt(kPi) * CMatrix::Identity(2, 2)).norm() < 1e-13);

    // 2x2 Jordan at alpha = 1: Gamma(I + X) = I + psi(1) X for X^2 = 0
    CMatrix x(2, 2);
    x.setZero();
    x(0, 1) = Complex(0.25, -0.1);
    CMatrix g1 = matrix_gamma(Complex(1, 0), x, tol);
    const double euler = 0.5772156649015329;
    CMatrix expect = CMatrix::Identity(2, 2) - euler * x;
    REQUIRE((g1 - expect).norm() < 1e-13);

    // oracle: numerically differentiated Gamma along the series
    // Gamma(alpha I + X) = sum Gamma^(k)(alpha) X^k / k!
    Complex alpha(0.6, 0.0);
    CMatrix x3 = CMatrix::Zero(3, 3);
    x3(0, 1) = 0.3;
    x3(1, 2) = -0.2;
    CMatrix got = matrix_gamma(alpha, x3, tol);
    double h = 1e-4;
    auto gfn = [&](double t) { return gamma_fn(alpha + t); };
    Complex d1 = (gfn(h) - gfn(-h)) / (2 * h);
    Complex d2 = (gfn(h) - 2.0 * gfn(0) + gfn(-h)) / (h * h);
    CMatrix oracle = gamma_fn(alpha) * CMatrix::Identity(3, 3) + d1 * x3 +
                     0.5 * d2 * (x3 * x3);
    REQUIRE((got - oracle).norm() < 1e-5);

    // inverse twist really inverts
    CMatrix gi = matrix_gamma(alpha, x3, tol, true);
    REQUIRE((got * gi - CMatrix::Identity(3, 3)).norm() < 1e-12);
}
