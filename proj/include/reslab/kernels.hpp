#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version selected at runtime. Set RESLAB_SIMD=scalar
// to pin the reference path.

#include <complex>
#include <span>
#include <string_view>

namespace reslab::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

[[nodiscard]] std::string_view name(Isa isa) noexcept;
[[nodiscard]] bool available(Isa isa) noexcept;
[[nodiscard]] Isa active_isa() noexcept;
/// Override the dispatch choice (tests, benchmarks). Ignored if unavailable.
void force_isa(Isa isa) noexcept;
void reset_isa() noexcept;

struct ProductSums {
    cplx product{1.0, 0.0}; // prod_k (1 - a_k)
    cplx ratio_sum{};       // sum_k a_k / (1 - a_k)
};

/// a_k = rate_k * z over structure-of-arrays rates.
[[nodiscard]] ProductSums line_product(std::span<const double> rate_re,
                                       std::span<const double> rate_im, cplx z);

/// out[n] = sum_j coeff_j * step_j^n, n = 0 .. out.size()-1.
void phasor_sweep(std::span<const double> coeff_re, std::span<const double> coeff_im,
                  std::span<const double> step_re, std::span<const double> step_im,
                  std::span<cplx> out);

// Fixed-ISA entry points, used by the equivalence tests.
namespace scalar {
ProductSums line_product(std::span<const double> rate_re, std::span<const double> rate_im, cplx z);
void phasor_sweep(std::span<const double> coeff_re, std::span<const double> coeff_im,
                  std::span<const double> step_re, std::span<const double> step_im,
                  std::span<cplx> out);
} // namespace scalar

#if defined(RESLAB_HAVE_AVX2)
namespace avx2 {
ProductSums line_product(std::span<const double> rate_re, std::span<const double> rate_im, cplx z);
void phasor_sweep(std::span<const double> coeff_re, std::span<const double> coeff_im,
                  std::span<const double> step_re, std::span<const double> step_im,
                  std::span<cplx> out);
} // namespace avx2
#endif

} // namespace reslab::kernels
