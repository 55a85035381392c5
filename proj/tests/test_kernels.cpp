#include "reslab/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace reslab::kernels;

namespace {

struct Rates {
    std::vector<double> re, im;
};

Rates random_rates(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    Rates r;
    for (std::size_t i = 0; i < n; ++i) {
        r.re.push_back(u(rng));
        r.im.push_back(u(rng));
    }
    return r;
}

} // namespace

TEST_CASE("scalar line product matches the definition") {
    std::mt19937_64 rng(3);
    const auto r = random_rates(13, rng);
    const cplx z{0.7, -0.4};
    cplx prod{1.0, 0.0};
    cplx ratio{};
    for (std::size_t k = 0; k < r.re.size(); ++k) {
        const cplx a = cplx{r.re[k], r.im[k]} * z;
        prod *= 1.0 - a;
        ratio += a / (1.0 - a);
    }
    const auto s = scalar::line_product(r.re, r.im, z);
    CHECK(std::abs(s.product - prod) < 1e-14);
    CHECK(std::abs(s.ratio_sum - ratio) < 1e-14);
}

TEST_CASE("scalar phasor sweep matches the definition") {
    const std::vector<double> cr{1.0, -0.5}, ci{0.0, 2.0}, sr{0.9, 0.1}, si{0.1, -0.8};
    std::vector<cplx> out(7);
    scalar::phasor_sweep(cr, ci, sr, si, out);
    for (std::size_t n = 0; n < out.size(); ++n) {
        cplx e{};
        for (std::size_t j = 0; j < 2; ++j) {
            e += cplx{cr[j], ci[j]} * std::pow(cplx{sr[j], si[j]}, static_cast<int>(n));
        }
        CHECK(std::abs(out[n] - e) < 1e-13);
    }
}

#if defined(RESLAB_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with scalar reference") {
    if (!available(Isa::Avx2)) {
        MESSAGE("AVX2 not available on this CPU; skipping");
        return;
    }
    std::mt19937_64 rng(7);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 1681u}) {
        const auto r = random_rates(n, rng);
        for (const cplx z : {cplx{0.3, 0.2}, cplx{-1.1, 0.4}, cplx{0.0, 1.5}}) {
            const auto a = scalar::line_product(r.re, r.im, z);
            const auto b = avx2::line_product(r.re, r.im, z);
            CHECK(std::abs(a.product - b.product) <= 1e-12 * std::max(1.0, std::abs(a.product)));
            CHECK(std::abs(a.ratio_sum - b.ratio_sum) <=
                  1e-12 * std::max(1.0, std::abs(a.ratio_sum)));
        }
        const auto c = random_rates(n, rng);
        std::vector<double> sr, si;
        std::uniform_real_distribution<double> ang(-3.0, 3.0);
        for (std::size_t j = 0; j < n; ++j) {
            const cplx q = std::polar(0.97, ang(rng));
            sr.push_back(q.real());
            si.push_back(q.imag());
        }
        std::vector<cplx> x(37), y(37);
        scalar::phasor_sweep(c.re, c.im, sr, si, x);
        avx2::phasor_sweep(c.re, c.im, sr, si, y);
        for (std::size_t i = 0; i < x.size(); ++i) {
            CHECK(std::abs(x[i] - y[i]) <= 1e-12 * std::max(1.0, std::abs(x[i])));
        }
    }
}
#endif

TEST_CASE("dispatch honours overrides") {
    force_isa(Isa::Scalar);
    CHECK(active_isa() == Isa::Scalar);
    reset_isa();
    CHECK(available(active_isa()));
    CHECK(name(Isa::Scalar) == "scalar");
}
