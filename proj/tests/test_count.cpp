#include "reslab/count.hpp"
#include "reslab/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace reslab;

namespace {

constexpr double kPi = std::numbers::pi;
const IntMatrix2 kCat{{{2, 1}, {1, 1}}};
const std::vector<double> kGrid{50, 100, 200, 400, 800, 1600};

int cat_oracle(double E) { return 2 * static_cast<int>(std::floor(E / (2.0 * kPi))) + 1; }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error thrown");
    return ErrorKind::Validation;
}

} // namespace

TEST_CASE("strip counts on the cat lattice") {
    const ToralSuspension cat{kCat, 1.0};
    const ResonanceSource src = exact_source(cat, 2000.0, 0.5);
    CHECK(count_in_strip(src, 100.0, 0.5) == 31);
    CHECK(count_in_strip(src, 5.0, 0.5) == 1);
    CHECK(count_in_strip(src, 0.0, 0.5) == 1);
    for (const double E : {7.0, 33.3, 100.0, 999.0, 1600.0}) {
        CHECK(count_in_strip(src, E, 0.5) == cat_oracle(E));
    }
    // Empty strip: a source with no points.
    const ResonanceSource none{{}, src.complete_in};
    CHECK(count_in_strip(none, 100.0, 0.5) == 0);

    CHECK(kind_of([&] { (void)count_in_strip(src, 2500.0, 0.5); }) ==
          ErrorKind::IncompleteSource);
    CHECK(kind_of([&] { (void)count_in_strip(src, 100.0, 1.0); }) ==
          ErrorKind::IncompleteSource);
    CHECK(kind_of([&] { (void)count_in_strip(src, 100.0, -1.0); }) == ErrorKind::Validation);
}

TEST_CASE("count monotonicity") {
    const HorseshoeSuspension hs;
    const ResonanceSource src = exact_source(hs, 300.0, 4.0);
    int prev = 0;
    for (double E = 0.0; E <= 300.0; E += 3.7) {
        const int n = count_in_strip(src, E, 2.5);
        CHECK(n >= prev);
        prev = n;
    }
    for (const double E : {10.0, 100.0, 250.0}) {
        int last = 0;
        for (const double beta : {0.5, 0.7, 1.0, 2.0, 2.5, 3.0, 4.0}) {
            const int n = count_in_strip(src, E, beta);
            CHECK(n >= last);
            last = n;
        }
    }
}

TEST_CASE("growth fit") {
    const ResonanceSource cat = exact_source(ToralSuspension{kCat, 1.0}, 2000.0, 0.5);
    const CountReport r = growth_fit(cat, kGrid, 0.5);
    CHECK(r.fitted_exponent == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(r.fitted_exponent - 1.0) <= 0.02);
    CHECK(r.half_width > 0.0);
    CHECK(r.half_width < 0.02);
    CHECK(r.per_unit_max == 1);
    for (const auto& c : r.strip_counts) {
        CHECK(c.count == cat_oracle(c.E));
        CHECK(c.per_unit == 1);
    }

    const ResonanceSource hs = exact_source(HorseshoeSuspension{}, 2000.0, 2.5);
    const CountReport h = growth_fit(hs, kGrid, 2.5);
    CHECK(std::abs(h.fitted_exponent - 1.0) <= 0.02);
    CHECK(h.per_unit_max == 3);
    for (const auto& c : h.strip_counts) {
        CHECK(c.per_unit == 3);
    }
    // Three lines, one point per 2 pi on each: N ~ 3 E / pi.
    const auto& last = h.strip_counts.back();
    CHECK(last.count / last.E == doctest::Approx(3.0 / kPi).epsilon(0.01));

    CHECK(kind_of([&] { (void)growth_fit(cat, {50, 100, 200, 400, 800}, 0.5); }) ==
          ErrorKind::InsufficientData);
    CHECK(kind_of([&] { (void)growth_fit(cat, {50, 40, 200, 400, 800, 1600}, 0.5); }) ==
          ErrorKind::Validation);
    const ResonanceSource shifted{{{{10.0, 0.0}, 1, Provenance::ExactLattice}},
                                  cat.complete_in};
    CHECK(kind_of([&] { (void)growth_fit(shifted, {1, 2, 3, 4, 5, 6}, 0.5); }) ==
          ErrorKind::InsufficientData);
}

TEST_CASE("lower-bound witness") {
    const ResonanceSource cat = exact_source(ToralSuspension{kCat, 1.0}, 2000.0, 0.5);
    const double lo = count_in_strip(cat, 100.0, 0.5) / std::pow(100.0, 0.9);
    const double hi = count_in_strip(cat, 1000.0, 0.5) / std::pow(1000.0, 0.9);
    CHECK(hi > lo);
}

TEST_CASE("per-unit window") {
    ResonanceSource src{{{{0.0, 0.0}, 1, Provenance::Located},
                         {{1.0, -0.1}, 2, Provenance::Located},
                         {{2.0, 0.0}, 1, Provenance::Located},
                         {{2.5, 0.0}, 1, Provenance::Located},
                         {{3.0, -5.0}, 7, Provenance::Located}},
                        {-10.0, 10.0, -6.0, std::numeric_limits<double>::infinity()}};
    // [0, 2] holds 1 + 2 + 1; [1, 3] holds 2 + 1 + 1.
    CHECK(per_unit_max(src, 10.0, 1.0) == 4);
    CHECK(per_unit_max(src, 10.0, 6.0) == 11);
    CHECK(per_unit_max(src, 1.5, 1.0) == 3);
}
