#include "terp/weight_filtration.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace terp;

namespace {

RMatrix jordan_block(int n) {
    RMatrix m = RMatrix::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
    return m;
}

RMatrix direct_sum(const RMatrix& a, const RMatrix& b) {
    RMatrix m = RMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

// random Jordan type with superdiagonal entries in {-2,-1,1,2}, conjugated by
// a random orthogonal matrix
RMatrix random_nilpotent(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> entry(0, 3);
    const double choices[4] = {1.0, -1.0, 2.0, -2.0};
    RMatrix m = RMatrix::Zero(n, n);
    int off = 0;
    while (off < n) {
        int b = 1 + static_cast<int>(rng() % (n - off));
        for (int i = 0; i + 1 < b; ++i) m(off + i, off + i + 1) = choices[entry(rng)];
        off += b;
    }
    RMatrix g = RMatrix::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) { return nd(rng); });
    Eigen::HouseholderQR<RMatrix> qr(g);
    RMatrix q = qr.householderQ();
    return q * m * q.transpose();
}

}  // namespace

TEST_CASE("trivial nilpotent") {
    RMatrix z = RMatrix::Zero(2, 2);
    WeightFiltration wf = weight_filtration(z, 0);
    REQUIRE(wf.dim_at(-1, {}) == 0);
    REQUIRE(wf.dim_at(0, {}) == 2);
    // any weight recenters the single jump
    WeightFiltration wf3 = weight_filtration(z, 3);
    REQUIRE(wf3.dim_at(2, {}) == 0);
    REQUIRE(wf3.dim_at(3, {}) == 2);
}

TEST_CASE("2x2 Jordan block at weight 0") {
    RMatrix n = jordan_block(2);
    WeightFiltration wf = weight_filtration(n, 0);
    REQUIRE(wf.dim_at(-2, {}) == 0);
    REQUIRE(wf.dim_at(-1, {}) == 1);
    REQUIRE(wf.dim_at(0, {}) == 1);
    REQUIRE(wf.dim_at(1, {}) == 2);
    RMatrix e1(2, 1);
    e1 << 1, 0;
    REQUIRE(linalg::same_subspace(wf.at(0), e1, {}));
    REQUIRE(weight_filtration_axioms_hold(n, 0, wf));
}

TEST_CASE("brute force: the Jordan-block filtration is the only one of its flag type") {
    // candidate middle subspaces: all lines spanned by small integer vectors
    RMatrix n = jordan_block(2);
    Tolerance tol;
    int valid = 0;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            if (a == 0 && b == 0) continue;
            RMatrix line(2, 1);
            line << a, b;
            // candidate: W_{-2}=0, W_{-1}=W_0=line, W_1=C^2
            std::vector<std::pair<int, RMatrix>> steps = {
                {-2, RMatrix(2, 0)}, {-1, line}, {0, line},
                {1, RMatrix::Identity(2, 2)}};
            WeightFiltration cand(2, 0, steps);
            if (weight_filtration_axioms_hold(n, 0, cand, tol)) {
                ++valid;
                RMatrix e1(2, 1);
                e1 << 1, 0;
                REQUIRE(linalg::same_subspace(RMatrix(cand.at(0)), e1, tol));
            }
        }
    REQUIRE(valid > 0);
}

TEST_CASE("graded pairing on the Jordan block") {
    RMatrix n = jordan_block(2);
    CMatrix s(2, 2);
    s << 0, 1, -1, 0;
    WeightFiltration wf = weight_filtration(n, 0);
    GradedPairing gp = graded_pairing(s, n, wf, 0, 1);
    REQUIRE(gp.values.rows() == 1);
    // basis of Gr_1 is +-e2; S(e2, N e2) = S(e2, e1) = -1 independent of the sign
    REQUIRE_THAT(gp.values(0, 0).real(), Catch::Matchers::WithinAbs(-1.0, 1e-12));

    // representative shift leaves the value unchanged
    RMatrix shifted = gp.basis;
    shifted(0, 0) += 3.7;  // add an element of W_0 = span(e1)
    CMatrix v = shifted.transpose().cast<Complex>() * s * (n * shifted).cast<Complex>();
    REQUIRE_THAT(v(0, 0).real(), Catch::Matchers::WithinAbs(gp.values(0, 0).real(), 1e-12));

    // N = 0, l = 0: S itself on Gr_w in the chosen graded basis
    RMatrix z = RMatrix::Zero(2, 2);
    WeightFiltration wfz = weight_filtration(z, 0);
    GradedPairing gz = graded_pairing(s, z, wfz, 0, 0);
    CMatrix expect = gz.basis.transpose().cast<Complex>() * s * gz.basis.cast<Complex>();
    REQUIRE((gz.values - expect).norm() < 1e-12);

    REQUIRE_THROWS_AS(graded_pairing(s, n, wf, 0, -1), std::invalid_argument);
}

TEST_CASE("primitive decomposition examples") {
    Tolerance tol;
    // N = 0: P_w is everything
    RMatrix z = RMatrix::Zero(3, 3);
    auto pdz = primitive_decomposition(z, weight_filtration(z, 2), 2, tol);
    REQUIRE(pdz.primitives.size() == 1);
    REQUIRE(pdz.primitives[0].level == 2);
    REQUIRE(linalg::rank(pdz.primitives[0].basis, tol) == 3);

    // 2x2 Jordan, w=0: P_1 = Gr_1 (dim 1), P_0 = 0, Gr_{-1} = N P_1
    RMatrix n2 = jordan_block(2);
    WeightFiltration wf2 = weight_filtration(n2, 0);
    auto pd2 = primitive_decomposition(n2, wf2, 0, tol);
    std::map<int, int> dims;
    for (const auto& p : pd2.primitives) dims[p.level] = linalg::rank(p.basis, tol);
    REQUIRE(dims[1] == 1);
    REQUIRE(dims[0] == 0);
    REQUIRE(pd2.decomposition.count(-1) == 1);
    RMatrix e1(2, 1);
    e1 << 1, 0;
    REQUIRE(linalg::same_subspace(pd2.decomposition.at(-1)[0], e1, tol));

    // 3x3 Jordan + 1x1, w=0: P_2 dim 1, P_0 dim 1
    RMatrix n4 = direct_sum(jordan_block(3), RMatrix::Zero(1, 1));
    WeightFiltration wf4 = weight_filtration(n4, 0);
    auto pd4 = primitive_decomposition(n4, wf4, 0, tol);
    std::map<int, int> dims4;
    for (const auto& p : pd4.primitives) dims4[p.level] = linalg::rank(p.basis, tol);
    REQUIRE(dims4[2] == 1);
    REQUIRE(dims4[0] == 1);
}

TEST_CASE("primitive decomposition spans every graded piece") {
    std::mt19937_64 rng(17);
    Tolerance tol;
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + static_cast<int>(rng() % 5);
        RMatrix nil = random_nilpotent(rng, n);
        int w = static_cast<int>(rng() % 5) - 2;
        WeightFiltration wf = weight_filtration(nil, w, tol);
        auto pd = primitive_decomposition(nil, wf, w, tol);
        for (int level = wf.lowest_level(); level <= wf.highest_level(); ++level) {
            int expect = wf.dim_at(level, tol) - wf.dim_at(level - 1, tol);
            int got = 0;
            RMatrix joined = wf.at(level - 1);
            if (pd.decomposition.count(level))
                for (const auto& piece : pd.decomposition.at(level)) {
                    joined = linalg::subspace_sum(joined, piece, tol);
                }
            got = linalg::rank(joined, tol) - wf.dim_at(level - 1, tol);
            REQUIRE(got == expect);
        }
    }
}

TEST_CASE("axioms hold on random nilpotents") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);
        RMatrix nil = random_nilpotent(rng, n);
        int w = static_cast<int>(rng() % 6) - 2;
        WeightFiltration wf = weight_filtration(nil, w);
        REQUIRE(weight_filtration_axioms_hold(nil, w, wf));
    }
}

TEST_CASE("non-nilpotent input is rejected") {
    RMatrix m = RMatrix::Identity(2, 2);
    REQUIRE_THROWS_AS(weight_filtration(m, 0), std::invalid_argument);
}
