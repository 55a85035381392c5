#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace reslab {

struct GaussLegendreRule {
    std::vector<double> nodes;   // on [-1, 1], ascending
    std::vector<double> weights;
};

/// n-point rule, computed once per n and cached (thread-safe).
[[nodiscard]] const GaussLegendreRule& gauss_legendre(int n);

struct AdaptiveResult {
    std::complex<double> value;
    double error_estimate = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) for a complex integrand on [a, b].
[[nodiscard]] AdaptiveResult integrate_adaptive(
    const std::function<std::complex<double>(double)>& f, double a, double b, double abs_tol,
    int max_intervals = 4000);

} // namespace reslab
