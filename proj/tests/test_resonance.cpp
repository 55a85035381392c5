#include "reslab/error.hpp"
#include "reslab/resonance.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace reslab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const IntMatrix2 kCat{{{2, 1}, {1, 1}}};

// Closed forms, independent of the product-form evaluator.
ZetaSample cat_zeta(cplx z) {
    const cplx e = std::exp(cplx{0.0, 1.0} * z);
    return {1.0 - e, -cplx{0.0, 1.0} * e / (1.0 - e)};
}

ZetaFunction horseshoe_zeta() {
    return continued_zeta(build_model(HorseshoeSuspension{}).data).function;
}

PrimitiveOrbit ms_orbit(bool orientable) {
    return {"o", 1.0, {std::exp(0.7)}, 1, orientable, {1.0}};
}

int total_multiplicity(const std::vector<Resonance>& rs) {
    int m = 0;
    for (const auto& r : rs) {
        m += r.multiplicity;
    }
    return m;
}

} // namespace

TEST_CASE("exact suspension lattice") {
    const auto cat = exact_suspension_lattice({{{1.0, 1}}}, 1.0, {-7.0, 7.0, -1.0, kInf});
    REQUIRE(cat.size() == 3);
    CHECK(cat[0].value.real() == doctest::Approx(-2 * kPi));
    CHECK(cat[1].value == cplx{0.0, 0.0});
    CHECK(cat[2].value.real() == doctest::Approx(2 * kPi));
    for (const auto& r : cat) {
        CHECK(r.multiplicity == 1);
        CHECK(r.provenance == Provenance::ExactLattice);
    }
    const auto half = exact_suspension_lattice({{{0.5, 1}}}, 1.0, {-1.0, 1.0, -1.0, 0.0});
    REQUIRE(half.size() == 1);
    CHECK(std::abs(half[0].value - cplx{0.0, -std::log(2.0)}) < 1e-15);
    CHECK(exact_suspension_lattice({{{0.5, 1}}}, 1.0, {1.0, 2.0, -1.0, 0.0}).empty());
    try {
        (void)exact_suspension_lattice({{{0.0, 1}}}, 1.0, {-1.0, 1.0, -1.0, 0.0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ZeroMapResonance);
    }
    // Roof rescaling.
    const auto r2 = exact_suspension_lattice({{{1.0, 1}}}, 2.0, {-4.0, 4.0, -1.0, 1.0});
    CHECK(r2.size() == 3);
    CHECK(r2[2].value.real() == doctest::Approx(kPi));
}

TEST_CASE("closed-orbit lattice") {
    const auto a = exact_morse_smale_closed_orbit(ms_orbit(true), {-1.0, 1.0, -2.0, kInf});
    REQUIRE(a.size() == 2);
    CHECK(std::abs(a[0].value - cplx{0.0, -1.4}) < 1e-14);
    CHECK(std::abs(a[1].value - cplx{0.0, -0.7}) < 1e-14);
    const auto b = exact_morse_smale_closed_orbit(ms_orbit(false), {-4.0, 4.0, -1.0, kInf});
    REQUIRE(b.size() == 2);
    CHECK(std::abs(b[0].value - cplx{-kPi, -0.7}) < 1e-14);
    CHECK(std::abs(b[1].value - cplx{kPi, -0.7}) < 1e-14);
    CHECK(exact_morse_smale_closed_orbit(ms_orbit(true), {-1.0, 1.0, 0.0, 1.0}).empty());

    // Series oracle: 1/(e^{0.7n} - 1) = sum_{k>=1} e^{-0.7nk}, i.e. the lines
    // are exactly the rates e^{-0.7k}.
    const auto lines = closed_orbit_lattice_lines(ms_orbit(true), -30.0);
    for (int n = 1; n <= 5; ++n) {
        double s = 0.0;
        for (const auto& l : lines) {
            s += std::exp(n * l.offset.imag());
        }
        CHECK(s == doctest::Approx(1.0 / (std::exp(0.7 * n) - 1.0)).epsilon(1e-11));
    }
}

TEST_CASE("fixed-point lattice") {
    const FixedPointDatum fp{"f", {-1.0, 2.0}, 1, {0.0}};
    const auto a = exact_fixed_point_lattice(fp, {-1.0, 1.0, -3.5, kInf});
    REQUIRE(a.size() == 3);
    // Sorted by (Re, Im): -3i, -2i, -i.
    CHECK(std::abs(a[0].value - cplx{0.0, -3.0}) < 1e-14);
    CHECK(a[0].multiplicity == 2);
    CHECK(std::abs(a[1].value - cplx{0.0, -2.0}) < 1e-14);
    CHECK(a[1].multiplicity == 1);
    CHECK(std::abs(a[2].value - cplx{0.0, -1.0}) < 1e-14);
    CHECK(a[2].multiplicity == 1);
    CHECK(exact_fixed_point_lattice(fp, {-1.0, 1.0, -0.5, kInf}).empty());
    const FixedPointDatum shifted{"g", {-1.0, 2.0}, 1, {0.5}};
    const auto c = exact_fixed_point_lattice(shifted, {-1.0, 1.0, -2.0, kInf});
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].value - cplx{0.0, -1.5}) < 1e-14);
}

TEST_CASE("Morse-Smale union") {
    const FixedPointDatum fp{"f", {-1.0, 2.0}, 1, {0.0}};
    const WindowSpec w{-1.0, 1.0, -2.0, kInf};
    const auto u = morse_smale_union(MorseSmale{{ms_orbit(true)}, {fp}}, w);
    REQUIRE(u.size() == 4);
    const double ims[] = {-2.0, -1.4, -1.0, -0.7};
    for (int i = 0; i < 4; ++i) {
        CHECK(std::abs(u[i].value - cplx{0.0, ims[i]}) < 1e-14);
    }
    CHECK(morse_smale_union(MorseSmale{}, w).empty());
    const auto twice = morse_smale_union(MorseSmale{{ms_orbit(true), ms_orbit(true)}, {}}, w);
    REQUIRE(twice.size() == 2);
    CHECK(twice[0].multiplicity == 2);
    CHECK(twice[1].multiplicity == 2);
}

TEST_CASE("argument-principle counts") {
    CHECK(count_zeros_argument_principle(cat_zeta, {-1.0, 1.0, -0.5, 0.5}) == 1);
    CHECK(count_zeros_argument_principle(cat_zeta, {1.0, 5.0, -0.5, 0.5}) == 0);
    CHECK(count_zeros_argument_principle(cat_zeta, {-7.0, 7.0, -0.5, 0.5}) == 3);
}

TEST_CASE("contour perturbation") {
    // Left edge through the zero at 0: moved outward by 0.37 * 2 pi.
    const auto c = count_zeros(cat_zeta, {0.0, 1.0, -0.5, 0.5});
    CHECK(c.perturbations == 1);
    CHECK(c.window.re_min == doctest::Approx(-0.37 * 2 * kPi));
    CHECK(c.count == 1);
    ContourOptions none;
    none.perturbation_attempts = 0;
    try {
        (void)count_zeros(cat_zeta, {0.0, 1.0, -0.5, 0.5}, none);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ContourTooClose);
    }
}

TEST_CASE("Newton refinement") {
    const auto r = refine_newton(cat_zeta, {0.3, 0.1});
    CHECK(std::abs(r.value) < 1e-10);
    CHECK(r.multiplicity == 1);
    CHECK(r.provenance == Provenance::Located);

    const auto h = refine_newton(horseshoe_zeta(), {0.01, -2.0});
    CHECK(std::abs(h.value - cplx{0.0, -std::log(8.0)}) < 1e-8);
    CHECK(h.multiplicity == 2);

    // exp has no zeros: Newton walks off forever.
    const ZetaFunction no_zeros = [](cplx z) { return ZetaSample{std::exp(z), 1.0}; };
    try {
        (void)refine_newton(no_zeros, {0.0, 0.0});
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoConvergence);
    }
}

TEST_CASE("locate resonances") {
    const auto cat = locate_resonances(cat_zeta, {-7.0, 7.0, -0.5, 0.5});
    REQUIRE(cat.resonances.size() == 3);
    for (int n = -1; n <= 1; ++n) {
        CHECK(std::abs(cat.resonances[n + 1].value - cplx{2 * kPi * n, 0.0}) < 1e-8);
        CHECK(cat.resonances[n + 1].multiplicity == 1);
    }
    const auto hs = locate_resonances(horseshoe_zeta(), {-1.0, 1.0, -2.5, -0.3});
    REQUIRE(hs.resonances.size() == 2);
    CHECK(std::abs(hs.resonances[0].value - cplx{0.0, -std::log(8.0)}) < 1e-8);
    CHECK(hs.resonances[0].multiplicity == 2);
    CHECK(std::abs(hs.resonances[1].value - cplx{0.0, -std::log(2.0)}) < 1e-8);
    CHECK(hs.resonances[1].multiplicity == 1);
    CHECK(locate_resonances(cat_zeta, {1.0, 5.0, -0.5, 0.5}).resonances.empty());
}

TEST_CASE("exact and located sets agree") {
    struct Case {
        SystemSpec spec;
        WindowSpec window;
    };
    HorseshoeSuspension signed_hs;
    signed_hs.symbol_weights = {1.0, -3.0};
    PrimitiveOrbit o{"o", 1.3, {std::exp(0.7), 0.6}, 1, true, {1.0}};
    const Case cases[] = {
        {ToralSuspension{kCat, 1.0}, {-13.0, 13.0, -0.5, 0.5}},
        {ToralSuspension{kCat, 2.0}, {-9.0, 9.0, -0.5, 0.5}},
        {HorseshoeSuspension{}, {-8.0, 8.0, -3.0, -0.2}},
        {signed_hs, {-8.0, 8.0, -2.3, 0.3}},
        {MorseSmale{{o}, {}}, {-6.0, 6.0, -1.3, -0.1}},
    };
    for (const auto& c : cases) {
        const auto model = build_model(c.spec);
        const auto cz = continued_zeta(model.data);
        LocateOptions opts;
        opts.contour.lattice_spacing = cz.lattice_spacing;
        const auto located = locate_resonances(cz.function, c.window, opts);
        const auto exact = exact_resonances(c.spec, located.window);
        REQUIRE(located.resonances.size() == exact.size());
        CHECK(total_multiplicity(located.resonances) == total_multiplicity(exact));
        for (const auto& e : exact) {
            const Resonance* best = nullptr;
            for (const auto& l : located.resonances) {
                if (!best || std::abs(l.value - e.value) < std::abs(best->value - e.value)) {
                    best = &l;
                }
            }
            REQUIRE(best != nullptr);
            CHECK(std::abs(best->value - e.value) < 1e-8);
            CHECK(best->multiplicity == e.multiplicity);
        }
    }
}

TEST_CASE("window additivity") {
    const auto f = horseshoe_zeta();
    const int whole = count_zeros_argument_principle(f, {-5.0, 5.0, -2.6, -0.2});
    const int parts = count_zeros_argument_principle(f, {-5.0, 0.4, -2.6, -1.1}) +
                      count_zeros_argument_principle(f, {0.4, 5.0, -2.6, -1.1}) +
                      count_zeros_argument_principle(f, {-5.0, 5.0, -1.1, -0.2});
    CHECK(whole == parts);
    CHECK(whole == 3); // simple zero at -i log 2, double at -i log 8
}

TEST_CASE("conjugation symmetry of lattices") {
    PrimitiveOrbit o{"o", 1.0, {cplx{2.0, 1.0}, cplx{2.0, -1.0}, 0.5}, 2, true, {1.0}};
    const auto set = exact_resonances(MorseSmale{{o}, {}}, {-10.0, 10.0, -3.0, 1.0});
    CHECK(!set.empty());
    for (const auto& r : set) {
        bool found = false;
        for (const auto& q : set) {
            if (std::abs(q.value + std::conj(r.value)) < 1e-9 && q.multiplicity == r.multiplicity) {
                found = true;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("merge adds multiplicities") {
    const auto m = merge_resonances({{cplx{1.0, 0.0}, 1, Provenance::ExactLattice},
                                     {cplx{1.0 + 1e-10, 0.0}, 2, Provenance::ExactLattice},
                                     {cplx{-1.0, 0.0}, 1, Provenance::ExactLattice}});
    REQUIRE(m.size() == 2);
    CHECK(m[1].multiplicity == 3);
}
