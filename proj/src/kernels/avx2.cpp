// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include "reslab/kernels.hpp"

#include <immintrin.h>

#include <vector>

namespace reslab::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

ProductSums line_product(std::span<const double> rate_re, std::span<const double> rate_im, cplx z) {
    const std::size_t n = rate_re.size();
    const std::size_t blocked = n - n % 4;

    const __m256d zr = _mm256_set1_pd(z.real());
    const __m256d zi = _mm256_set1_pd(z.imag());
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d p_re = one;
    __m256d p_im = _mm256_setzero_pd();
    __m256d s_re = _mm256_setzero_pd();
    __m256d s_im = _mm256_setzero_pd();

    for (std::size_t k = 0; k < blocked; k += 4) {
        const __m256d rr = _mm256_loadu_pd(rate_re.data() + k);
        const __m256d ri = _mm256_loadu_pd(rate_im.data() + k);
        const __m256d a_re = _mm256_fmsub_pd(rr, zr, _mm256_mul_pd(ri, zi));
        const __m256d a_im = _mm256_fmadd_pd(rr, zi, _mm256_mul_pd(ri, zr));
        const __m256d f_re = _mm256_sub_pd(one, a_re);
        const __m256d f_im = _mm256_sub_pd(_mm256_setzero_pd(), a_im);

        const __m256d np_re = _mm256_fmsub_pd(p_re, f_re, _mm256_mul_pd(p_im, f_im));
        const __m256d np_im = _mm256_fmadd_pd(p_re, f_im, _mm256_mul_pd(p_im, f_re));
        p_re = np_re;
        p_im = np_im;

        const __m256d den = _mm256_fmadd_pd(f_re, f_re, _mm256_mul_pd(f_im, f_im));
        const __m256d num_re = _mm256_fmadd_pd(a_re, f_re, _mm256_mul_pd(a_im, f_im));
        const __m256d num_im = _mm256_fmsub_pd(a_im, f_re, _mm256_mul_pd(a_re, f_im));
        s_re = _mm256_add_pd(s_re, _mm256_div_pd(num_re, den));
        s_im = _mm256_add_pd(s_im, _mm256_div_pd(num_im, den));
    }

    alignas(32) double pr[4];
    alignas(32) double pi[4];
    _mm256_store_pd(pr, p_re);
    _mm256_store_pd(pi, p_im);
    ProductSums out;
    for (int lane = 0; lane < 4; ++lane) {
        out.product *= cplx{pr[lane], pi[lane]};
    }
    out.ratio_sum = {hsum(s_re), hsum(s_im)};

    const ProductSums rest =
        scalar::line_product(rate_re.subspan(blocked), rate_im.subspan(blocked), z);
    out.product *= rest.product;
    out.ratio_sum += rest.ratio_sum;
    return out;
}

void phasor_sweep(std::span<const double> coeff_re, std::span<const double> coeff_im,
                  std::span<const double> step_re, std::span<const double> step_im,
                  std::span<cplx> out) {
    const std::size_t m = coeff_re.size();
    const std::size_t blocked = m - m % 4;
    const std::size_t steps = out.size();

    std::vector<__m256d> acc_re(steps, _mm256_setzero_pd());
    std::vector<__m256d> acc_im(steps, _mm256_setzero_pd());
    for (std::size_t j = 0; j < blocked; j += 4) {
        __m256d c_re = _mm256_loadu_pd(coeff_re.data() + j);
        __m256d c_im = _mm256_loadu_pd(coeff_im.data() + j);
        const __m256d q_re = _mm256_loadu_pd(step_re.data() + j);
        const __m256d q_im = _mm256_loadu_pd(step_im.data() + j);
        for (std::size_t n = 0; n < steps; ++n) {
            acc_re[n] = _mm256_add_pd(acc_re[n], c_re);
            acc_im[n] = _mm256_add_pd(acc_im[n], c_im);
            const __m256d t = _mm256_fmsub_pd(c_re, q_re, _mm256_mul_pd(c_im, q_im));
            c_im = _mm256_fmadd_pd(c_re, q_im, _mm256_mul_pd(c_im, q_re));
            c_re = t;
        }
    }

    scalar::phasor_sweep(coeff_re.subspan(blocked), coeff_im.subspan(blocked),
                         step_re.subspan(blocked), step_im.subspan(blocked), out);
    for (std::size_t n = 0; n < steps; ++n) {
        out[n] += cplx{hsum(acc_re[n]), hsum(acc_im[n])};
    }
}

} // namespace reslab::kernels::avx2
