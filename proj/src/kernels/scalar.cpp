#include "reslab/kernels.hpp"

namespace reslab::kernels::scalar {

ProductSums line_product(std::span<const double> rate_re, std::span<const double> rate_im, cplx z) {
    ProductSums out;
    const std::size_t n = rate_re.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double a_re = rate_re[k] * z.real() - rate_im[k] * z.imag();
        const double a_im = rate_re[k] * z.imag() + rate_im[k] * z.real();
        const double f_re = 1.0 - a_re;
        const double f_im = -a_im;
        const double p_re = out.product.real() * f_re - out.product.imag() * f_im;
        const double p_im = out.product.real() * f_im + out.product.imag() * f_re;
        out.product = {p_re, p_im};
        const double den = f_re * f_re + f_im * f_im;
        out.ratio_sum += cplx{(a_re * f_re + a_im * f_im) / den, (a_im * f_re - a_re * f_im) / den};
    }
    return out;
}

void phasor_sweep(std::span<const double> coeff_re, std::span<const double> coeff_im,
                  std::span<const double> step_re, std::span<const double> step_im,
                  std::span<cplx> out) {
    for (cplx& v : out) {
        v = {};
    }
    const std::size_t m = coeff_re.size();
    for (std::size_t j = 0; j < m; ++j) {
        double c_re = coeff_re[j];
        double c_im = coeff_im[j];
        for (cplx& v : out) {
            v += cplx{c_re, c_im};
            const double t = c_re * step_re[j] - c_im * step_im[j];
            c_im = c_re * step_im[j] + c_im * step_re[j];
            c_re = t;
        }
    }
}

} // namespace reslab::kernels::scalar
