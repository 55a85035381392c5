#include "reslab/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace reslab::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(RESLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect() noexcept {
    if (const char* env = std::getenv("RESLAB_SIMD")) {
        if (std::string_view(env) == "scalar") {
            return Isa::Scalar;
        }
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<int>& selected() {
    static std::atomic<int> isa{static_cast<int>(detect())};
    return isa;
}

} // namespace

std::string_view name(Isa isa) noexcept {
    return isa == Isa::Avx2 ? "avx2" : "scalar";
}

bool available(Isa isa) noexcept {
    return isa == Isa::Scalar || cpu_has_avx2();
}

Isa active_isa() noexcept {
    return static_cast<Isa>(selected().load(std::memory_order_relaxed));
}

void force_isa(Isa isa) noexcept {
    if (available(isa)) {
        selected().store(static_cast<int>(isa), std::memory_order_relaxed);
    }
}

void reset_isa() noexcept {
    selected().store(static_cast<int>(detect()), std::memory_order_relaxed);
}

ProductSums line_product(std::span<const double> rate_re, std::span<const double> rate_im, cplx z) {
#if defined(RESLAB_HAVE_AVX2)
    if (active_isa() == Isa::Avx2) {
        return avx2::line_product(rate_re, rate_im, z);
    }
#endif
    return scalar::line_product(rate_re, rate_im, z);
}

void phasor_sweep(std::span<const double> coeff_re, std::span<const double> coeff_im,
                  std::span<const double> step_re, std::span<const double> step_im,
                  std::span<cplx> out) {
#if defined(RESLAB_HAVE_AVX2)
    if (active_isa() == Isa::Avx2) {
        avx2::phasor_sweep(coeff_re, coeff_im, step_re, step_im, out);
        return;
    }
#endif
    scalar::phasor_sweep(coeff_re, coeff_im, step_re, step_im, out);
}

} // namespace reslab::kernels
