#include "reslab/error.hpp"
#include "reslab/orbit.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace reslab;

namespace {

// 2x2 integer matrix power, plain loops.
struct M2 {
    long long a, b, c, d;
};

M2 mul(M2 x, M2 y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
}

} // namespace

TEST_CASE("det_factor examples") {
    CHECK(det_factor(std::vector<cplx>{2.0}, 1) == doctest::Approx(1.0));

    const double lam = (3.0 + std::sqrt(5.0)) / 2.0;
    const M2 a{2, 1, 1, 1};
    const M2 a2 = mul(a, a);
    const long long oracle = std::llabs((a2.a - 1) * (a2.d - 1) - a2.b * a2.c);
    CHECK(oracle == 5);
    CHECK(det_factor(std::vector<cplx>{lam * lam, 1.0 / (lam * lam)}, 1) ==
          doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));

    CHECK(det_factor(std::vector<cplx>{4.0, 0.25}, 1) ==
          doctest::Approx(std::abs((1 - 4.0) * (1 - 0.25))).epsilon(1e-14));
}

TEST_CASE("det_factor rejects unit-modulus eigenvalues") {
    CHECK_THROWS_AS((void)det_factor(std::vector<cplx>{1.0 + 1e-12}, 1), Error);
    try {
        (void)det_factor(std::vector<cplx>{std::polar(1.0, 0.3)}, 2);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonHyperbolic);
    }
}

TEST_CASE("iterate_weight examples") {
    CHECK(iterate_weight(std::vector<cplx>{1.0}, 7) == cplx{1.0, 0.0});
    CHECK(iterate_weight(std::vector<cplx>{std::exp(-0.5)}, 2).real() ==
          doctest::Approx(0.367879441).epsilon(1e-9));
    CHECK(iterate_weight(std::vector<cplx>{0.5, -0.5}, 2).real() ==
          doctest::Approx(0.25 + 0.25));
}

TEST_CASE("geometric_term examples") {
    PrimitiveOrbit o{"a", 1.0, {2.0}, 1, true, {1.0}};
    CHECK(geometric_term(o, 1).real() == doctest::Approx(1.0));

    PrimitiveOrbit h{"h", 1.0, {4.0, 0.25}, 1, true, {1.0}};
    CHECK(geometric_term(h, 1).real() == doctest::Approx(1.0 / 2.25).epsilon(1e-14));

    PrimitiveOrbit s{"s", 2.0, {4.0, 0.25}, 1, true, {-1.0}};
    const double denom = 63.0 * (1.0 - 1.0 / 64.0);
    CHECK(geometric_term(s, 3).real() == doctest::Approx(-2.0 / denom).epsilon(1e-14));
    CHECK(geometric_term(s, 3).real() == doctest::Approx(-0.0322581).epsilon(1e-5));
}

TEST_CASE("orbit validation") {
    PrimitiveOrbit bad{"x", 1.0, {2.0, 3.0}, 1, true, {1.0}};
    CHECK_THROWS_AS(validate(bad), Error);
    PrimitiveOrbit neg{"y", -1.0, {2.0}, 1, true, {1.0}};
    CHECK_THROWS_AS(validate(neg), Error);
    PrimitiveOrbit empty_w{"z", 1.0, {2.0}, 1, true, {}};
    CHECK_THROWS_AS(validate(empty_w), Error);
    FixedPointDatum fp{"f", {-1.0, 2.0}, 1, {0.0}};
    CHECK_NOTHROW(validate(fp));
    fp.stable_count = 2;
    CHECK_THROWS_AS(validate(fp), Error);
}

TEST_CASE("multiplicativity under iteration") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logmod(-2.0, 2.0);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<cplx> eigs;
        for (int j = 0; j < 3; ++j) {
            double lm = logmod(rng);
            if (std::abs(lm) < 0.05) {
                lm = 0.05;
            }
            eigs.push_back(std::polar(std::exp(lm), angle(rng)));
        }
        for (int n = 1; n <= 10; ++n) {
            std::vector<cplx> powered;
            for (cplx e : eigs) {
                cplx p{1.0, 0.0};
                for (int k = 0; k < n; ++k) {
                    p *= e;
                }
                powered.push_back(p);
            }
            CHECK(det_factor(eigs, n) == doctest::Approx(det_factor(powered, 1)).epsilon(1e-12));
        }
    }
}

TEST_CASE("geometric-series expansion of 1/det") {
    const double u = 3.0;
    const double v = 0.4;
    // 1/|(1-u)(1-v)| = (1/u) sum_k u^-k sum_l v^l for |u| > 1 > |v|, u, v > 0.
    double series = 0.0;
    for (int k = 0; k <= 200; ++k) {
        for (int l = 0; l <= 200; ++l) {
            series += std::pow(u, -(k + 1)) * std::pow(v, l);
        }
    }
    const double direct = 1.0 / det_factor(std::vector<cplx>{u, v}, 1);
    CHECK(std::abs(series - direct) / direct < 1e-10);
}

TEST_CASE("power sums agree with matrix-power traces") {
    // Companion matrix of x^2 - 3x + 1 (eigenvalues 3/2 +- sqrt(5)/2).
    const double s5 = std::sqrt(5.0);
    const std::vector<cplx> eig2{(3 + s5) / 2, (3 - s5) / 2};
    M2 c{0, -1, 1, 3};
    M2 p{1, 0, 0, 1};
    for (int n = 1; n <= 12; ++n) {
        p = mul(p, c);
        CHECK(iterate_weight(eig2, n).real() ==
              doctest::Approx(static_cast<double>(p.a + p.d)).epsilon(1e-12));
    }
    // Companion matrix of (x-1)(x-2)(x+3) = x^3 - 7x + 6.
    const std::vector<cplx> eig3{1.0, 2.0, -3.0};
    double m[3][3] = {{0, 0, -6}, {1, 0, 7}, {0, 1, 0}};
    double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int n = 1; n <= 10; ++n) {
        double r[3][3] = {};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    r[i][j] += q[i][k] * m[k][j];
        double tr = 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                q[i][j] = r[i][j];
            }
            tr += q[i][i];
        }
        CHECK(iterate_weight(eig3, n).real() == doctest::Approx(tr).epsilon(1e-12));
    }
}
