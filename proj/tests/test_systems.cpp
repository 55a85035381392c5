#include "reslab/error.hpp"
#include "reslab/systems.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>

using namespace reslab;

namespace {

const IntMatrix2 kCat{{{2, 1}, {1, 1}}};

// det(A^p - I) by repeated 64-bit multiplication, valid for small p.
long long small_count(const IntMatrix2& a, int p) {
    long long m[2][2] = {{1, 0}, {0, 1}};
    for (int i = 0; i < p; ++i) {
        long long r[2][2];
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                r[x][y] = m[x][0] * a[0][y] + m[x][1] * a[1][y];
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                m[x][y] = r[x][y];
    }
    return std::llabs((m[0][0] - 1) * (m[1][1] - 1) - m[0][1] * m[1][0]);
}

} // namespace

TEST_CASE("toral fixed-point counts") {
    CHECK(toral_fixed_point_count(kCat, 1) == 1);
    CHECK(toral_fixed_point_count(kCat, 2) == 5);
    CHECK(toral_fixed_point_count(kCat, 3) == 16);
    for (int p = 1; p <= 20; ++p) {
        CHECK(toral_fixed_point_count(kCat, p) == small_count(kCat, p));
    }
    // Lucas numbers: N_p = L_{2p} - 2 for the cat map.
    BigInt a = 2, b = 1;
    for (int p = 1; p <= 60; ++p) {
        const BigInt even = a + b; // L_{2p}
        const BigInt odd = b + even;
        a = even;
        b = odd;
        CHECK(toral_fixed_point_count(kCat, p) == even - 2);
    }
    CHECK_THROWS_AS((void)toral_fixed_point_count(IntMatrix2{{{1, 1}, {0, 1}}}, 1), Error);
}

TEST_CASE("toral primitive counts") {
    CHECK(toral_primitive_orbit_count(kCat, 1) == 1);
    CHECK(toral_primitive_orbit_count(kCat, 2) == 2);
    CHECK(toral_primitive_orbit_count(kCat, 3) == 5);
    for (int p = 1; p <= 15; ++p) {
        BigInt total = 0;
        for (int d = 1; d <= p; ++d) {
            if (p % d == 0) {
                total += d * toral_primitive_orbit_count(kCat, d);
            }
        }
        CHECK(total == toral_fixed_point_count(kCat, p));
    }
}

TEST_CASE("toral suspension class weights are exactly the roof") {
    const auto data = toral_suspension_period_classes({kCat, 1.0}, 40);
    REQUIRE(data.period_classes.size() == 40);
    for (std::size_t i = 0; i < 40; ++i) {
        CHECK(data.period_classes[i].total_period == static_cast<double>(i + 1));
        CHECK(data.period_classes[i].geometric_weight == cplx{1.0, 0.0});
    }
    const auto roof2 = toral_suspension_period_classes({kCat, 2.0}, 3);
    CHECK(roof2.period_classes[2].total_period == 6.0);
    // Map-level trace 1 times the roof.
    CHECK(roof2.period_classes[0].geometric_weight.real() == 2.0);

    const auto other = toral_suspension_period_classes({IntMatrix2{{{3, 1}, {2, 1}}}, 1.0}, 1);
    CHECK(toral_fixed_point_count(IntMatrix2{{{3, 1}, {2, 1}}}, 1) == 2);
    CHECK(other.period_classes[0].geometric_weight.real() == 1.0);

    // det = -1, trace 1: hyperbolic.
    const auto flip = toral_suspension_period_classes({IntMatrix2{{{1, 1}, {1, 0}}}, 1.0}, 10);
    for (const auto& c : flip.period_classes) {
        CHECK(c.geometric_weight.real() == 1.0);
    }
}

TEST_CASE("lyndon words") {
    const auto w1 = lyndon_words(2, 1);
    CHECK(w1 == std::vector<Word>{{0}, {1}});
    const auto w3 = lyndon_words(2, 3);
    CHECK(w3 == std::vector<Word>{{0}, {1}, {0, 1}, {0, 0, 1}, {0, 1, 1}});
    CHECK(lyndon_words(2, 5).size() == 14);
    for (int k = 2; k <= 3; ++k) {
        const auto words = lyndon_words(k, 12 - 3 * (k - 2));
        std::map<std::size_t, int> by_len;
        for (const auto& w : words) {
            ++by_len[w.size()];
        }
        for (const auto& [len, count] : by_len) {
            CHECK(necklace_count(k, static_cast<int>(len)) == count);
        }
        // Completeness: sum_{|w| divides p} |w| #{...} = k^p.
        for (int p = 1; p <= 12 - 3 * (k - 2); ++p) {
            long long total = 0;
            for (const auto& [len, count] : by_len) {
                if (p % static_cast<int>(len) == 0) {
                    total += static_cast<long long>(len) * count;
                }
            }
            CHECK(total == static_cast<long long>(std::pow(k, p)));
        }
    }
}

TEST_CASE("horseshoe class weights") {
    const HorseshoeSuspension hs;
    const auto data = horseshoe_orbits(hs, 12);
    CHECK(data.period_classes[0].geometric_weight.real() ==
          doctest::Approx(2.0 / (0.75 * 3.0)).epsilon(1e-14));
    CHECK(data.period_classes[1].geometric_weight.real() ==
          doctest::Approx(4.0 / 14.0625).epsilon(1e-14));
    HorseshoeSuspension signed_hs;
    signed_hs.symbol_weights = {1.0, -3.0};
    const auto s = horseshoe_orbits(signed_hs, 3);
    CHECK(s.period_classes[0].geometric_weight.real() == doctest::Approx(-0.888889).epsilon(1e-6));
}

TEST_CASE("horseshoe aggregation matches brute force over all words") {
    HorseshoeSuspension hs;
    hs.symbol_weights = {0.7, -1.3};
    hs.roof = 1.0;
    const auto data = horseshoe_orbits(hs, 12);
    const auto closed = horseshoe_period_classes(hs, 12);
    for (int p = 1; p <= 12; ++p) {
        // Every periodic point of period p is a word of length p; weight = product of g's.
        double numerator = 0.0;
        double magnitude = 0.0;
        for (long long code = 0; code < (1LL << p); ++code) {
            double w = 1.0;
            for (int i = 0; i < p; ++i) {
                w *= hs.symbol_weights[(code >> i) & 1];
            }
            numerator += w;
            magnitude += std::abs(w);
        }
        const double det = std::abs((1 - std::pow(0.25, -p)) * (1 - std::pow(4.0, -p)));
        const double brute = numerator / det;
        // Signed weights cancel; scale the tolerance by the unsigned sum.
        const double scale = std::max(std::abs(brute), magnitude / det * 1e-4);
        const double agg = data.period_classes[p - 1].geometric_weight.real();
        CHECK(std::abs(agg - brute) <= 1e-11 * scale);
        CHECK(std::abs(closed[p - 1].geometric_weight.real() - brute) <= 1e-11 * scale);
    }
}

TEST_CASE("horseshoe lines reproduce class weights") {
    const HorseshoeSuspension hs;
    double omitted = -1.0;
    const auto lines = horseshoe_lines(hs, 40, &omitted);
    CHECK(omitted >= 0.0);
    CHECK(omitted < 1e-20);
    CHECK(lines[0].rate.real() == doctest::Approx(0.5));
    CHECK(lines[1].rate.real() == doctest::Approx(0.125));
    CHECK(lines[1].multiplicity == 2);
    const auto classes = horseshoe_period_classes(hs, 10);
    for (int p = 1; p <= 10; ++p) {
        double s = 0.0;
        for (const auto& l : lines) {
            s += l.multiplicity * std::pow(l.rate.real(), p);
        }
        CHECK(s == doctest::Approx(classes[p - 1].geometric_weight.real()).epsilon(1e-13));
    }
}

TEST_CASE("Morse-Smale assembly") {
    PrimitiveOrbit o{"o", 1.0, {std::exp(0.7)}, 1, true, {1.0}};
    MorseSmale ms{{o}, {}};
    const auto a = assemble_morse_smale(ms, 10.0);
    REQUIRE(a.orbits.period_classes.size() == 10);
    for (int n = 1; n <= 10; ++n) {
        CHECK(a.orbits.period_classes[n - 1].geometric_weight.real() ==
              doctest::Approx(1.0 / (std::exp(0.7 * n) - 1.0)).epsilon(1e-12));
    }
    FixedPointDatum fp{"f", {-1.0, 2.0}, 1, {0.0}};
    const auto b = assemble_morse_smale(MorseSmale{{}, {fp}}, 10.0);
    CHECK(b.orbits.period_classes.empty());
    CHECK(b.fixed_points.size() == 1);
    const auto c = assemble_morse_smale(MorseSmale{{o}, {fp}}, 10.0);
    CHECK(c.orbits.period_classes.size() == 10);
    CHECK(c.fixed_points.size() == 1);

    PrimitiveOrbit bad{"broken", 1.0, {1.0}, 0, true, {1.0}};
    try {
        (void)assemble_morse_smale(MorseSmale{{bad}, {}}, 10.0);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("broken") != std::string::npos);
    }
}

TEST_CASE("closed-orbit lines reproduce class weights with signs") {
    // Non-orientable: negative stable eigenvalue.
    PrimitiveOrbit o{"n", 1.5, {-std::exp(0.6), 0.3}, 1, false, {1.0, 0.5}};
    const auto lines = closed_orbit_lines(o, 1e-18);
    for (int n = 1; n <= 8; ++n) {
        cplx s{};
        for (const auto& l : lines) {
            s += static_cast<double>(l.multiplicity) * std::pow(l.rate, n);
        }
        const cplx direct = geometric_term(o, n) / o.primitive_period;
        CHECK(std::abs(s - direct) < 1e-12 * std::abs(direct));
    }
}

TEST_CASE("build_model") {
    const auto cat = build_model(ToralSuspension{kCat, 1.0});
    CHECK(cat.data.period_classes.size() == 60);
    CHECK(cat.ambient_dimension == 3);
    const auto hs = build_model(HorseshoeSuspension{});
    CHECK(hs.data.period_classes.size() == 60);
    CHECK(hs.data.primitive_orbits->size() == lyndon_words(2, 12).size());
    PrimitiveOrbit o{"o", 2.0, {std::exp(0.7), 0.5}, 1, true, {1.0}};
    const auto ms = build_model(MorseSmale{{o}, {}});
    CHECK(ms.roof == 2.0);
    CHECK(ms.ambient_dimension == 3);
    CHECK(ms.data.horizon == 120.0);
}
